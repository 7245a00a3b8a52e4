#include "ssle/superalgebra.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

#include "ssle/errors.hpp"

namespace ssle {

namespace {

int family_rank(Family f) {
  switch (f) {
    case Family::C: return -1;
    case Family::L: return 0;
    case Family::J: return 1;
    case Family::Gp: return 2;
    case Family::Gm: return 3;
    case Family::G: return 4;
  }
  return 0;
}

const char* family_name(Family f) {
  switch (f) {
    case Family::C: return "C";
    case Family::L: return "L";
    case Family::J: return "J";
    case Family::Gp: return "Gp";
    case Family::Gm: return "Gm";
    case Family::G: return "G";
  }
  return "?";
}

void add_to(GenCombination& out, const Gen& g, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = out.try_emplace(g, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) out.erase(it);
  }
}

Rational cube_term(const Rational& m) { return (m * m * m - m) / 12; }

// Bracket for family(x) <= family(y) in enum order.
GenCombination raw_bracket(const Gen& x, const Gen& y, const Algebra& alg) {
  GenCombination out;
  const Rational r = x.mode(), s = y.mode();
  const int sum = x.twice_mode + y.twice_mode;
  const bool central = sum == 0;
  const Family fx = x.family, fy = y.family;
  if (fx == Family::C || fy == Family::C) return out;
  if (fx == Family::L && fy == Family::L) {
    add_to(out, {Family::L, sum}, r - s);
    if (central) add_to(out, Cgen(), cube_term(r));
  } else if (fx == Family::L && fy == Family::J) {
    add_to(out, {Family::J, sum}, -s);
  } else if (fx == Family::J && fy == Family::J) {
    if (central) add_to(out, Cgen(), r / 3);
  } else if (fx == Family::L && (fy == Family::G || fy == Family::Gp || fy == Family::Gm)) {
    add_to(out, {fy, sum}, r / 2 - s);
  } else if (fx == Family::J && (fy == Family::Gp || fy == Family::Gm)) {
    add_to(out, {fy, sum}, Rational(fy == Family::Gp ? 1 : -1));
  } else if (fx == Family::G && fy == Family::G) {
    add_to(out, {Family::L, sum}, Rational(2));
    if (central) add_to(out, Cgen(), (r * r - Rational(1, 4)) / 3);
  } else if ((fx == Family::Gp && fy == Family::Gp) || (fx == Family::Gm && fy == Family::Gm)) {
    // anticommute
  } else if (fx == Family::Gp && fy == Family::Gm) {
    if (alg.table == NS2Table::Standard) {
      add_to(out, {Family::L, sum}, Rational(2));
      add_to(out, {Family::J, sum}, r - s);
      if (central) add_to(out, Cgen(), (r * r - Rational(1, 4)) / 3);
    } else {
      // Printed table: {G+_{m+1/2}, G-_{n+1/2}} = 2L_{m+n} + (m-n+1)J_{m+n} + (m^2+m)/3 delta_{m+n,0} C.
      const Rational m = r - Rational(1, 2), n = s - Rational(1, 2);
      const int twice_mn = sum - 2;
      add_to(out, {Family::L, twice_mn}, Rational(2));
      add_to(out, {Family::J, twice_mn}, m - n + 1);
      if (twice_mn == 0) add_to(out, Cgen(), (m * m + m) / 3);
    }
  } else {
    throw UsageError("bracket: unsupported generator pair " + gen_string(x) + ", " + gen_string(y));
  }
  return out;
}

std::tuple<int, int, int> pbw_key(const Gen& g) {
  return {g.family == Family::C ? 0 : 1, g.twice_mode, family_rank(g.family)};
}

}  // namespace

std::string gen_string(const Gen& g) {
  if (g.family == Family::C) return "C";
  std::string out = family_name(g.family);
  if (g.twice_mode % 2 == 0)
    out += std::to_string(g.twice_mode / 2);
  else
    out += std::to_string(g.twice_mode) + "/2";
  return out;
}

std::string monomial_string(const Monomial& m) {
  if (m.empty()) return "1";
  std::string out;
  for (const auto& g : m) {
    if (!out.empty()) out += ' ';
    out += gen_string(g);
  }
  return out;
}

Gen parse_gen(const std::string& s) {
  if (s == "C") return Cgen();
  Family f;
  std::size_t pos;
  if (s.rfind("Gp", 0) == 0) {
    f = Family::Gp;
    pos = 2;
  } else if (s.rfind("Gm", 0) == 0) {
    f = Family::Gm;
    pos = 2;
  } else if (!s.empty() && (s[0] == 'G' || s[0] == 'L' || s[0] == 'J')) {
    f = s[0] == 'G' ? Family::G : (s[0] == 'L' ? Family::L : Family::J);
    pos = 1;
  } else {
    throw UsageError("unknown generator '" + s + "'");
  }
  Rational mode = parse_rational(s.substr(pos));
  Rational twice = 2 * mode;
  if (twice.get_den() != 1) throw UsageError("bad mode in generator '" + s + "'");
  Gen g{f, static_cast<int>(twice.get_num().get_si())};
  const bool half = g.twice_mode % 2 != 0;
  if (half != g.odd()) throw UsageError("mode parity does not match family in '" + s + "'");
  return g;
}

Monomial parse_monomial(const std::string& s) {
  Monomial m;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j > i) {
      std::string tok = s.substr(i, j - i);
      if (tok != "1") m.push_back(parse_gen(tok));
    }
    i = j;
  }
  return m;
}

int monomial_parity(const Monomial& m) {
  int p = 0;
  for (const auto& g : m) p ^= g.odd() ? 1 : 0;
  return p;
}

int twice_level(const Monomial& m) {
  int t = 0;
  for (const auto& g : m) t -= g.twice_mode;
  return t;
}

bool Algebra::contains(const Gen& g) const {
  const bool half = g.twice_mode % 2 != 0;
  if (g.family == Family::C) return g.twice_mode == 0;
  if (half != g.odd()) return false;
  switch (kind) {
    case AlgebraKind::Virasoro: return g.family == Family::L;
    case AlgebraKind::NS1: return g.family == Family::L || g.family == Family::G;
    case AlgebraKind::NS2:
      return g.family == Family::L || g.family == Family::J || g.family == Family::Gp || g.family == Family::Gm;
  }
  return false;
}

std::string Algebra::name() const {
  switch (kind) {
    case AlgebraKind::Virasoro: return "vir";
    case AlgebraKind::NS1: return "ns1";
    case AlgebraKind::NS2: return table == NS2Table::Standard ? "ns2" : "ns2-printed";
  }
  return "?";
}

Algebra virasoro() { return {AlgebraKind::Virasoro, NS2Table::Standard}; }
Algebra ns1() { return {AlgebraKind::NS1, NS2Table::Standard}; }
Algebra ns2(NS2Table table) { return {AlgebraKind::NS2, table}; }

GenCombination bracket(const Gen& x, const Gen& y, const Algebra& alg) {
  if (!alg.contains(x) || !alg.contains(y))
    throw UsageError("bracket: generator not in " + alg.name() + ": " + gen_string(x) + ", " + gen_string(y));
  if (family_rank(x.family) <= family_rank(y.family)) return raw_bracket(x, y, alg);
  // [y, x} = -(-1)^{|x||y|} [x, y}
  GenCombination out = raw_bracket(y, x, alg);
  if (!(x.odd() && y.odd()))
    for (auto& [g, c] : out) c = -c;
  return out;
}

void UEAElement::add(const Monomial& m, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms.erase(it);
  }
}

std::string UEAElement::to_string() const {
  if (terms.empty()) return "0";
  std::string out;
  for (const auto& [m, c] : terms) {
    if (!out.empty()) out += " + ";
    out += "(" + ssle::to_string(c) + ") " + monomial_string(m);
  }
  return out;
}

UEAElement uea_monomial(const Monomial& m, const Rational& c) {
  UEAElement u;
  u.add(m, c);
  return u;
}

UEAElement operator+(const UEAElement& a, const UEAElement& b) {
  UEAElement r = a;
  for (const auto& [m, c] : b.terms) r.add(m, c);
  return r;
}

UEAElement operator*(const UEAElement& a, const UEAElement& b) {
  UEAElement r;
  for (const auto& [ma, ca] : a.terms)
    for (const auto& [mb, cb] : b.terms) {
      Monomial m = ma;
      m.insert(m.end(), mb.begin(), mb.end());
      r.add(m, ca * cb);
    }
  return r;
}

UEAElement operator*(const Rational& s, const UEAElement& a) {
  UEAElement r;
  for (const auto& [m, c] : a.terms) r.add(m, s * c);
  return r;
}

bool pbw_less(const Gen& a, const Gen& b) { return pbw_key(a) < pbw_key(b); }

bool is_normal_ordered(const Monomial& m) {
  for (std::size_t i = 0; i + 1 < m.size(); ++i) {
    if (pbw_less(m[i + 1], m[i])) return false;
    if (m[i] == m[i + 1] && m[i].odd()) return false;
  }
  return true;
}

UEAElement normal_order(const UEAElement& x, const Algebra& alg) {
  UEAElement result;
  std::vector<std::pair<Monomial, Rational>> work(x.terms.begin(), x.terms.end());
  auto splice = [](const Monomial& m, std::size_t i, const Gen& g) {
    Monomial out(m.begin(), m.begin() + static_cast<long>(i));
    out.push_back(g);
    out.insert(out.end(), m.begin() + static_cast<long>(i) + 2, m.end());
    return out;
  };
  while (!work.empty()) {
    auto [m, c] = std::move(work.back());
    work.pop_back();
    for (const auto& g : m)
      if (!alg.contains(g)) throw UsageError("normal_order: generator not in algebra: " + gen_string(g));
    std::size_t i = 0;
    for (; i + 1 < m.size(); ++i)
      if (pbw_less(m[i + 1], m[i]) || (m[i] == m[i + 1] && m[i].odd())) break;
    if (i + 1 >= m.size()) {
      result.add(m, c);
      continue;
    }
    const Gen a = m[i], b = m[i + 1];
    if (a == b) {
      // x x = 1/2 {x, x} for odd x.
      for (const auto& [g, k] : bracket(a, a, alg)) work.emplace_back(splice(m, i, g), c * k / 2);
      continue;
    }
    Monomial swapped = m;
    std::swap(swapped[i], swapped[i + 1]);
    work.emplace_back(std::move(swapped), (a.odd() && b.odd()) ? Rational(-c) : c);
    for (const auto& [g, k] : bracket(a, b, alg)) work.emplace_back(splice(m, i, g), c * k);
  }
  return result;
}

GenCombination jacobi_violation(const Gen& x, const Gen& y, const Gen& z, const Algebra& alg) {
  auto sign = [](const Gen& a, const Gen& b) { return (a.odd() && b.odd()) ? -1 : 1; };
  GenCombination out;
  auto nested = [&](const Gen& a, const Gen& b, const Gen& cgen, int s) {
    for (const auto& [g, k] : bracket(b, cgen, alg)) {
      if (g.family == Family::C) continue;
      for (const auto& [g2, k2] : bracket(a, g, alg)) add_to(out, g2, Rational(s) * k * k2);
    }
  };
  nested(x, y, z, sign(x, z));
  nested(y, z, x, sign(y, x));
  nested(z, x, y, sign(z, y));
  return out;
}

std::vector<Gen> generators_up_to(const Algebra& alg, int max_twice) {
  std::vector<Gen> out;
  for (int t = -max_twice; t <= max_twice; ++t)
    for (Family f : {Family::L, Family::J, Family::Gp, Family::Gm, Family::G}) {
      Gen g{f, t};
      if (alg.contains(g)) out.push_back(g);
    }
  return out;
}

// ----------------------------------------------------------------------------

std::string verma_string(const VermaVector& v) {
  if (v.empty()) return "0";
  std::string out;
  for (const auto& [m, c] : v) {
    if (!out.empty()) out += " + ";
    out += "(" + to_string(c) + ") " + monomial_string(m);
  }
  return out;
}

void verma_add(VermaVector& v, const Monomial& m, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = v.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) v.erase(it);
  }
}

namespace {

void accumulate(VermaVector& out, const VermaVector& v, const Rational& s) {
  for (const auto& [m, c] : v) verma_add(out, m, s * c);
}

}  // namespace

VermaVector VermaModule::apply(const Gen& x, const Monomial& m) const {
  if (!alg_.contains(x)) throw UsageError("act: generator " + gen_string(x) + " not in " + alg_.name());
  VermaVector out;
  if (x.family == Family::C) {
    verma_add(out, m, w_.c);
    return out;
  }
  if (m.empty()) {
    if (x.twice_mode < 0) {
      verma_add(out, {x}, Rational(1));
    } else if (x.twice_mode == 0) {
      if (x.family == Family::L) verma_add(out, m, w_.h);
      if (x.family == Family::J) verma_add(out, m, w_.alpha);
    }
    return out;
  }
  auto key = std::make_pair(x, m);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const Gen g1 = m.front();
  const Monomial rest(m.begin() + 1, m.end());
  if (x.twice_mode < 0 && (pbw_less(x, g1) || (x == g1 && !x.odd()))) {
    Monomial longer;
    longer.reserve(m.size() + 1);
    longer.push_back(x);
    longer.insert(longer.end(), m.begin(), m.end());
    verma_add(out, longer, Rational(1));
  } else if (x == g1 && x.odd()) {
    for (const auto& [g, k] : bracket(x, x, alg_)) accumulate(out, apply(g, rest), k / 2);
  } else {
    const Rational sign = (x.odd() && g1.odd()) ? -1 : 1;
    accumulate(out, apply(g1, apply(x, rest)), sign);
    for (const auto& [g, k] : bracket(x, g1, alg_)) accumulate(out, apply(g, rest), k);
  }
  cache_.emplace(std::move(key), out);
  return out;
}

VermaVector VermaModule::apply(const Gen& x, const VermaVector& v) const {
  VermaVector out;
  for (const auto& [m, c] : v) accumulate(out, apply(x, m), c);
  return out;
}

VermaVector VermaModule::act(const UEAElement& u, const VermaVector& v) const {
  VermaVector out;
  for (const auto& [mono, coef] : u.terms) {
    VermaVector cur = v;
    for (auto it = mono.rbegin(); it != mono.rend(); ++it) cur = apply(*it, cur);
    accumulate(out, cur, coef);
  }
  return out;
}

std::vector<Gen> VermaModule::positive_generators() const {
  switch (alg_.kind) {
    case AlgebraKind::Virasoro: return {L(1), L(2)};
    case AlgebraKind::NS1: return {L(1), L(2), G(1), G(3)};
    case AlgebraKind::NS2: return {L(1), J(1), Gp(1), Gm(1)};
  }
  return {};
}

std::vector<Monomial> VermaModule::basis(int twice_max) const {
  std::vector<Gen> gens;
  for (int t = -1; t >= -twice_max; --t)
    for (Family f : {Family::L, Family::J, Family::Gp, Family::Gm, Family::G}) {
      Gen g{f, t};
      if (alg_.contains(g)) gens.push_back(g);
    }
  std::sort(gens.begin(), gens.end(), pbw_less);
  std::vector<Monomial> out;
  Monomial cur;
  // Recursively choose multiplicities in PBW order.
  auto rec = [&](auto&& self, std::size_t i, int budget) -> void {
    if (i == gens.size()) {
      out.push_back(cur);
      return;
    }
    const Gen& g = gens[i];
    const int cost = -g.twice_mode;
    const int max_count = g.odd() ? 1 : budget / cost;
    for (int k = 0; k <= max_count && k * cost <= budget; ++k) {
      for (int j = 0; j < k; ++j) cur.push_back(g);
      self(self, i + 1, budget - k * cost);
      for (int j = 0; j < k; ++j) cur.pop_back();
    }
  };
  rec(rec, 0, twice_max);
  std::sort(out.begin(), out.end(), [](const Monomial& a, const Monomial& b) {
    int la = twice_level(a), lb = twice_level(b);
    if (la != lb) return la < lb;
    return a < b;
  });
  return out;
}

Gen dagger(const Gen& g) {
  switch (g.family) {
    case Family::Gp: return {Family::Gm, -g.twice_mode};
    case Family::Gm: return {Family::Gp, -g.twice_mode};
    case Family::C: return g;
    default: return {g.family, -g.twice_mode};
  }
}

Rational VermaModule::shapovalov(const Monomial& b, const VermaVector& v) const {
  VermaVector cur = v;
  for (const auto& g : b) cur = apply(dagger(g), cur);
  auto it = cur.find(Monomial{});
  return it == cur.end() ? Rational(0) : it->second;
}

SingularReport is_singular(const VermaModule& mod, const VermaVector& v) {
  SingularReport rep;
  if (v.empty()) {
    rep.transcript.push_back("zero vector is not singular");
    return rep;
  }
  const int lvl = twice_level(v.begin()->first);
  for (const auto& [m, c] : v)
    if (twice_level(m) != lvl) throw UsageError("is_singular: vector is not level-homogeneous");
  if (lvl == 0) {
    rep.transcript.push_back("highest-weight vector itself");
    return rep;
  }
  rep.pass = true;
  for (const Gen& x : mod.positive_generators()) {
    VermaVector img = mod.apply(x, v);
    rep.transcript.push_back(gen_string(x) + " -> " + verma_string(img));
    if (!img.empty() && rep.pass) {
      rep.pass = false;
      rep.witness = x;
      rep.witness_image = img;
    }
  }
  return rep;
}

SingularSolution solve_singular_params(const Algebra& alg, const std::vector<Monomial>& templ, const Rational& h,
                                       const Rational& alpha) {
  SingularSolution sol;
  if (templ.empty()) throw UsageError("solve_singular_params: empty template");
  const int lvl = twice_level(templ.front());
  for (const auto& m : templ) {
    if (twice_level(m) != lvl) throw UsageError("solve_singular_params: template is not level-homogeneous");
    if (!is_normal_ordered(m)) throw UsageError("solve_singular_params: template monomial not in PBW order");
  }
  const std::size_t k = templ.size();
  VermaModule m0(alg, {Rational(0), h, alpha});
  VermaModule m1(alg, {Rational(1), h, alpha});
  // Unknowns: y_1..y_{k-1}, c, w_1..w_{k-1} (w_i stands for c*y_i).
  const std::size_t nu = 2 * (k - 1) + 1;
  const std::size_t col_c = k - 1;
  std::map<std::pair<Gen, Monomial>, std::size_t> row_of;
  RMatrix a;
  RVector b;
  auto row = [&](const Gen& x, const Monomial& mono) -> std::size_t {
    auto [it, inserted] = row_of.try_emplace({x, mono}, a.size());
    if (inserted) {
      a.emplace_back(nu, Rational(0));
      b.emplace_back(0);
    }
    return it->second;
  };
  for (const Gen& x : m0.positive_generators()) {
    for (std::size_t i = 0; i < k; ++i) {
      VermaVector beta = m0.apply(x, templ[i]);
      VermaVector gamma = m1.apply(x, templ[i]);
      for (const auto& [mono, c] : beta) verma_add(gamma, mono, -c);
      for (const auto& [mono, c] : beta) {
        std::size_t r = row(x, mono);
        if (i == 0)
          b[r] -= c;
        else
          a[r][i - 1] += c;
      }
      for (const auto& [mono, c] : gamma) {
        std::size_t r = row(x, mono);
        if (i == 0)
          a[r][col_c] += c;
        else
          a[r][col_c + i] += c;
      }
    }
  }
  LinearSolution ls = solve_linear(a, b);
  if (!ls.consistent) {
    sol.status = "inconsistent";
    return sol;
  }
  for (const auto& v : ls.kernel)
    for (std::size_t j = 0; j < col_c; ++j)
      if (sgn(v[j]) != 0) {
        sol.status = "underdetermined";
        return sol;
      }
  RVector x = ls.particular;
  if (!ls.kernel.empty()) {
    // The y_i are pinned; w_i = c y_i is then linear in the kernel parameters.
    const std::size_t nk = ls.kernel.size();
    RMatrix ca;
    RVector cb;
    for (std::size_t i = 1; i < k; ++i) {
      const Rational& y = x[i - 1];
      RVector rowv(nk);
      for (std::size_t j = 0; j < nk; ++j) rowv[j] = ls.kernel[j][col_c + i] - ls.kernel[j][col_c] * y;
      ca.push_back(rowv);
      cb.push_back(x[col_c] * y - x[col_c + i]);
    }
    LinearSolution cs = solve_linear(ca, cb);
    if (!cs.consistent) {
      sol.status = "inconsistent";
      return sol;
    }
    for (const auto& v : cs.kernel) {
      Rational dc = 0;
      for (std::size_t j = 0; j < nk; ++j) dc += v[j] * ls.kernel[j][col_c];
      if (sgn(dc) != 0) {
        sol.status = "underdetermined";
        return sol;
      }
    }
    for (std::size_t j = 0; j < nk; ++j)
      for (std::size_t r = 0; r < nu; ++r) x[r] += cs.particular[j] * ls.kernel[j][r];
  }
  sol.c = x[col_c];
  sol.coefficients.push_back(Rational(1));
  for (std::size_t i = 1; i < k; ++i) sol.coefficients.push_back(x[i - 1]);
  // The linearisation may hide the constraint w_i = c y_i; confirm directly.
  VermaModule check(alg, {sol.c, h, alpha});
  VermaVector v;
  for (std::size_t i = 0; i < k; ++i) verma_add(v, templ[i], sol.coefficients[i]);
  if (!is_singular(check, v).pass) {
    sol.status = "inconsistent";
    return sol;
  }
  sol.found = true;
  sol.status = "solved";
  return sol;
}

// ----------------------------------------------------------------------------

TruncatedModule::TruncatedModule(const VermaModule& mod, int twice_max)
    : mod_(mod), twice_max_(twice_max), basis_(mod.basis(twice_max)) {
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    index_[basis_[i]] = static_cast<int>(i);
    parity_.push_back(monomial_parity(basis_[i]));
    level_.push_back(ssle::twice_level(basis_[i]));
  }
}

int TruncatedModule::index_of(const Monomial& m) const {
  auto it = index_.find(m);
  return it == index_.end() ? -1 : it->second;
}

RVector TruncatedModule::coordinates(const VermaVector& v) const {
  RVector out(basis_.size(), Rational(0));
  for (const auto& [m, c] : v) {
    if (ssle::twice_level(m) > twice_max_) continue;
    int i = index_of(m);
    if (i < 0) throw std::logic_error("coordinates: monomial missing from basis: " + monomial_string(m));
    out[i] = c;
  }
  return out;
}

GeneratorMatrix TruncatedModule::matrix(const UEAElement& u) const {
  GeneratorMatrix gm;
  gm.columns.resize(basis_.size());
  for (std::size_t j = 0; j < basis_.size(); ++j) {
    VermaVector img = mod_.act(u, VermaVector{{basis_[j], Rational(1)}});
    RVector col = coordinates(img);
    for (std::size_t i = 0; i < col.size(); ++i)
      if (sgn(col[i]) != 0) gm.columns[j].emplace_back(static_cast<int>(i), col[i]);
  }
  return gm;
}

RMatrix TruncatedModule::gram() const {
  RMatrix g(basis_.size(), RVector(basis_.size(), Rational(0)));
  for (std::size_t i = 0; i < basis_.size(); ++i)
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      if (level_[i] != level_[j]) continue;
      g[i][j] = mod_.shapovalov(basis_[i], VermaVector{{basis_[j], Rational(1)}});
    }
  return g;
}

SuperUEA super_product(const SuperUEA& a, const SuperUEA& b) {
  SuperUEA out;
  for (const auto& ta : a)
    for (const auto& tb : b) {
      Monomial m = ta.mono;
      m.insert(m.end(), tb.mono.begin(), tb.mono.end());
      Grassmann<Rational> nu = tb.coef;
      if (monomial_parity(ta.mono)) nu = nu.even_part() - nu.odd_part();
      out.push_back({ta.coef * nu, std::move(m)});
    }
  return out;
}

std::map<Monomial, Grassmann<Rational>> super_normal_form(const SuperUEA& x, const Algebra& alg, int n_gens) {
  std::map<Monomial, Grassmann<Rational>> out;
  for (const auto& t : x) {
    UEAElement no = normal_order(uea_monomial(t.mono), alg);
    for (const auto& [m, k] : no.terms) {
      auto [it, inserted] = out.try_emplace(m, Grassmann<Rational>(n_gens));
      it->second += t.coef * k;
    }
  }
  for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

GrassmannMatrix identity_matrix(int dim, int n_gens) {
  GrassmannMatrix m{dim, n_gens, std::vector<Grassmann<Rational>>(dim * dim, Grassmann<Rational>(n_gens))};
  for (int i = 0; i < dim; ++i) m.at(i, i) = Grassmann<Rational>::one(n_gens);
  return m;
}

GrassmannMatrix super_matrix(const TruncatedModule& tm, const SuperUEA& x, int n_gens) {
  GrassmannMatrix out = identity_matrix(tm.dim(), n_gens);
  for (auto& e : out.entries) e = Grassmann<Rational>(n_gens);
  for (const auto& t : x) {
    GeneratorMatrix o = tm.matrix(uea_monomial(t.mono));
    const Grassmann<Rational> even = t.coef.even_part(), odd = t.coef.odd_part();
    for (int j = 0; j < tm.dim(); ++j)
      for (const auto& [i, v] : o.columns[j]) {
        Grassmann<Rational> mu = tm.parity(i) ? even - odd : even + odd;
        out.at(i, j) += mu * v;
      }
  }
  return out;
}

GrassmannMatrix matrix_product(const GrassmannMatrix& a, const GrassmannMatrix& b) {
  if (a.dim != b.dim) throw UsageError("matrix_product: dimension mismatch");
  GrassmannMatrix out = identity_matrix(a.dim, a.n_gens);
  for (auto& e : out.entries) e = Grassmann<Rational>(a.n_gens);
  for (int i = 0; i < a.dim; ++i)
    for (int k = 0; k < a.dim; ++k) {
      if (a.at(i, k).is_zero()) continue;
      for (int j = 0; j < a.dim; ++j)
        if (!b.at(k, j).is_zero()) out.at(i, j) += a.at(i, k) * b.at(k, j);
    }
  return out;
}

GrassmannMatrix nilpotent_exp(const GrassmannMatrix& m) {
  GrassmannMatrix sum = identity_matrix(m.dim, m.n_gens);
  GrassmannMatrix term = sum;
  for (int k = 1;; ++k) {
    if (k > m.dim + 1) throw std::logic_error("nilpotent_exp: matrix is not nilpotent");
    term = matrix_product(term, m);
    bool zero = true;
    for (auto& e : term.entries) {
      e *= Rational(1, k);
      zero = zero && e.is_zero();
    }
    if (zero) break;
    for (std::size_t i = 0; i < sum.entries.size(); ++i) sum.entries[i] += term.entries[i];
  }
  return sum;
}

GrassmannMatrix q_matrix(const TruncatedModule& tm, int n_gens, const std::map<int, Grassmann<Rational>>& A,
                         const std::map<int, Grassmann<Rational>>& B, const std::map<int, Grassmann<Rational>>& M,
                         const std::map<int, Grassmann<Rational>>& Mp, const std::map<int, Grassmann<Rational>>& Mm) {
  SuperUEA x;
  for (const auto& [j, c] : A) x.push_back({-c, {L(j)}});
  for (const auto& [j, c] : B) x.push_back({-c, {J(j)}});
  for (const auto& [j, c] : M) x.push_back({-c, {G(2 * j + 1)}});
  for (const auto& [j, c] : Mp) x.push_back({-c, {Gp(2 * j + 1)}});
  for (const auto& [j, c] : Mm) x.push_back({-c, {Gm(2 * j + 1)}});
  for (const auto& t : x)
    if (t.mono.front().twice_mode >= 0) throw UsageError("q_matrix: only negative modes are supported");
  return nilpotent_exp(super_matrix(tm, x, n_gens));
}

}  // namespace ssle
