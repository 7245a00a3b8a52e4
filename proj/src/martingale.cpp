#include "ssle/martingale.hpp"

#include <omp.h>

#include <cmath>
#include <stdexcept>

#include "ssle/errors.hpp"
#include "ssle/superfield.hpp"

namespace ssle {

using GR = Grassmann<Rational>;

std::string model_name(ModelKind k) {
  switch (k) {
    case ModelKind::Virasoro: return "vir";
    case ModelKind::N1: return "ns1";
    case ModelKind::N2: return "ns2";
  }
  return "?";
}

ModelKind parse_model(const std::string& s) {
  if (s == "vir" || s == "virasoro") return ModelKind::Virasoro;
  if (s == "ns1" || s == "n1") return ModelKind::N1;
  if (s == "ns2" || s == "n2") return ModelKind::N2;
  throw UsageError("unknown model '" + s + "' (expected vir, ns1 or ns2)");
}

Weights virasoro_weights(const Rational& kappa) {
  if (sgn(kappa) <= 0) throw UsageError("kappa must be > 0");
  Rational d = kappa - 4;
  return {1 - 3 * d * d / (2 * kappa), (6 - kappa) / (2 * kappa), Rational(0)};
}

Weights n1_weights(const Rational& kappa) {
  if (sgn(kappa) <= 0) throw UsageError("kappa must be > 0");
  if (kappa == 4) throw DegenerateParameterError("N=1 map is degenerate at kappa = 4 (h = 0)");
  return {Rational(3, 2) - 6 * (4 - kappa) / kappa, (12 - 3 * kappa) / (4 * kappa), Rational(0)};
}

namespace {

void check_ns2_inputs(const Rational& t, const Rational& alpha) {
  if (sgn(t) == 0) throw DegenerateParameterError("N=2 relations need t != 0");
  if (sgn(alpha) == 0 || alpha == 1) throw DegenerateParameterError("N=2 relations need alpha not in {0, 1}");
}

}  // namespace

Ns2Parameters ns2_derived_parameters(const Rational& t, const Rational& alpha) {
  check_ns2_inputs(t, alpha);
  Ns2Parameters p;
  p.alpha = alpha;
  p.kappa = 1 / alpha;
  p.c = 3 - 3 * t;
  p.h = Rational(-1, 2) + (1 - alpha * alpha) / (2 * t);
  p.a = (alpha * alpha - 1) / (t * alpha);
  return p;
}

Ns2Parameters ns2_printed_parameters(const Rational& t, const Rational& alpha) {
  check_ns2_inputs(t, alpha);
  Ns2Parameters p;
  p.alpha = alpha;
  p.kappa = 1 / alpha;
  p.c = 3 - 3 * t;
  p.h = Rational(-1, 2) + Rational(3, 8) / t - (4 * alpha * alpha - 1) / t;
  p.a = (alpha - 1) * (alpha - 1) / (t * alpha);
  return p;
}

ModelSpec build_model_virasoro(const Rational& kappa) {
  ModelSpec m;
  m.kind = ModelKind::Virasoro;
  m.alg = virasoro();
  m.kappa = kappa;
  m.weights = virasoro_weights(kappa);
  m.n_gens = 0;
  const GR one = GR::one(0);
  m.drift = {{one * Rational(-2), {L(-2)}}, {one * Rational(kappa / 2), {L(-1), L(-1)}}};
  m.noise = {{kappa, {{one, {L(-1)}}}}};
  m.pairing_weight = one;
  return m;
}

ModelSpec build_model_n1(const Rational& kappa) {
  ModelSpec m;
  m.kind = ModelKind::N1;
  m.alg = ns1();
  m.kappa = kappa;
  m.weights = n1_weights(kappa);
  m.n_gens = 2;
  const GR one = GR::one(2), z1 = GR::generator(2, 1), z2 = GR::generator(2, 2);
  const GR z21 = z2 * z1;
  const Rational k4 = kappa / 4;
  m.drift = {{one * Rational(-2), {L(-2)}},
             {one * Rational(kappa / 2), {L(-1), L(-1)}},
             {z21 * Rational(-k4), {G(-3), G(-1)}},
             {z21 * k4, {G(-1), G(-3)}}};
  m.noise = {{kappa, {{one, {L(-1)}}}}, {kappa / 2, {{z1, {G(-1)}}, {z2, {G(-3)}}}}};
  m.pairing_weight = one + z21;
  m.berezin_order = {1, 2};
  return m;
}

ModelSpec build_model_n2(const Ns2Parameters& p) {
  ModelSpec m;
  m.kind = ModelKind::N2;
  m.alg = ns2(NS2Table::Standard);
  m.kappa = p.kappa;
  m.a = p.a;
  m.weights = {p.c, p.h, p.alpha};
  m.n_gens = 2;
  const GR one = GR::one(2), z1 = GR::generator(2, 1), z2 = GR::generator(2, 2);
  const GR z12 = z1 * z2;
  const Rational k2 = p.kappa / 2;
  m.drift = {{one, {L(-1)}},
             {one * p.a, {J(-1)}},
             {z12 * k2, {Gp(-1), Gm(-1)}},
             {z12 * Rational(-k2), {Gm(-1), Gp(-1)}}};
  m.noise = {{p.kappa, {{z1, {Gp(-1)}}, {z2, {Gm(-1)}}}}};
  m.pairing_weight = one + z12;
  m.berezin_order = {2, 1};
  return m;
}

std::map<Monomial, GR> group_step_drift(const ModelSpec& m) {
  SuperUEA total = m.drift;
  for (const auto& nt : m.noise) {
    SuperUEA sq = super_product(nt.unit, nt.unit);
    for (auto& t : sq) total.push_back({t.coef * Rational(-nt.scale_sq / 2), t.mono});
  }
  return super_normal_form(total, m.alg, m.n_gens);
}

VermaVector integrated_drift(const ModelSpec& m) {
  VermaModule mod(m.alg, m.weights);
  std::map<Monomial, GR> g;
  const VermaVector hw{{Monomial{}, Rational(1)}};
  for (const auto& t : m.drift) {
    VermaVector img = mod.act(uea_monomial(t.mono), hw);
    for (const auto& [b, v] : img) {
      GR mu = monomial_parity(b) ? t.coef.even_part() - t.coef.odd_part() : t.coef;
      auto [it, inserted] = g.try_emplace(b, GR(m.n_gens));
      it->second += mu * v;
    }
  }
  VermaVector out;
  for (const auto& [b, coef] : g) {
    GR r = (coef * m.pairing_weight).berezin(m.berezin_order);
    if (!r.soul().is_zero()) throw std::logic_error("integrated_drift: Grassmann content survived integration");
    verma_add(out, b, r.body());
  }
  return out;
}

std::vector<Monomial> singular_template(ModelKind k) {
  switch (k) {
    case ModelKind::Virasoro: return {{L(-2)}, {L(-1), L(-1)}};
    case ModelKind::N1: return {{L(-2)}, {L(-1), L(-1)}, {G(-3), G(-1)}};
    case ModelKind::N2: return {{L(-1)}, {Gp(-1), Gm(-1)}, {J(-1)}};
  }
  return {};
}

DriftReport drift_is_null(const ModelSpec& m) {
  DriftReport rep;
  rep.drift = integrated_drift(m);
  auto templ = singular_template(m.kind);
  SingularSolution sol = solve_singular_params(m.alg, templ, m.weights.h, m.weights.alpha);
  if (!sol.found) {
    rep.status = "no singular vector of the expected shape at h = " + to_string(m.weights.h) + " (" + sol.status + ")";
    return rep;
  }
  for (std::size_t i = 0; i < templ.size(); ++i) verma_add(rep.singular_vector, templ[i], sol.coefficients[i]);
  VermaModule mod(m.alg, m.weights);
  SingularReport sr = is_singular(mod, rep.singular_vector);
  rep.transcript = sr.transcript;
  if (sol.c != m.weights.c) {
    rep.status = "singular vector requires c = " + to_string(sol.c) + ", model has c = " + to_string(m.weights.c);
    return rep;
  }
  if (!sr.pass) {
    rep.status = "reference vector failed the singular check";
    return rep;
  }
  auto lead = rep.drift.find(templ.front());
  rep.lambda = lead == rep.drift.end() ? Rational(0) : lead->second;
  VermaVector scaled;
  for (const auto& [b, c] : rep.singular_vector) verma_add(scaled, b, rep.lambda * c);
  rep.pass = scaled == rep.drift;
  rep.status = rep.pass ? "integrated drift = (" + to_string(rep.lambda) + ") x singular vector"
                        : "integrated drift is not proportional to the singular vector";
  return rep;
}

GroupDynamics compile_dynamics(const ModelSpec& m, int twice_level) {
  TruncatedModule tm(VermaModule(m.alg, m.weights), twice_level);
  GroupDynamics dyn;
  dyn.dim = tm.dim();
  dyn.n_gens = m.n_gens;
  dyn.noise_dims = static_cast<int>(m.noise.size());
  dyn.hw_index = tm.index_of(Monomial{});
  for (int i = 0; i < tm.dim(); ++i) dyn.twice_level.push_back(tm.twice_level(i));
  auto emit = [&](const Monomial& mono, const GR& coef, double scale, int source) {
    GeneratorMatrix o = tm.matrix(uea_monomial(mono));
    for (int j = 0; j < tm.dim(); ++j)
      for (const auto& [i, v] : o.columns[j])
        for (const auto& [mask, c] : coef.terms()) {
          const bool flip = (std::popcount(mask) & 1) && tm.parity(i);
          Rational entry = flip ? Rational(-c * v) : Rational(c * v);
          dyn.terms.push_back({i, j, static_cast<unsigned>(mask), entry.get_d() * scale, source});
        }
  };
  for (const auto& [mono, coef] : group_step_drift(m)) emit(mono, coef, 1.0, 0);
  for (std::size_t k = 0; k < m.noise.size(); ++k) {
    const double s = std::sqrt(m.noise[k].scale_sq.get_d());
    for (const auto& t : m.noise[k].unit) emit(t.mono, t.coef, s, static_cast<int>(k) + 1);
  }
  return dyn;
}

namespace {

struct Readout {
  int dim = 0, gsize = 0;
  std::vector<double> gram;     // dim x dim
  std::vector<double> weight;   // per Grassmann mask: body of int(mask * w)
  std::vector<double> initial;  // tracked values at Q = Id
  std::vector<std::string> names;
};

Readout make_readout(const ModelSpec& m, const GroupDynamics& dyn, int twice_level) {
  TruncatedModule tm(VermaModule(m.alg, m.weights), twice_level);
  Readout r;
  r.dim = tm.dim();
  r.gsize = 1 << m.n_gens;
  RMatrix g = tm.gram();
  for (const auto& row : g)
    for (const auto& x : row) r.gram.push_back(x.get_d());
  for (int mask = 0; mask < r.gsize; ++mask) {
    GR mono(m.n_gens);
    mono.add_term(static_cast<Mask>(mask), Rational(1));
    r.weight.push_back((mono * m.pairing_weight).berezin(m.berezin_order).body().get_d());
  }
  for (const auto& b : tm.basis()) r.names.push_back(monomial_string(b));
  r.initial.assign(r.dim, 0.0);
  for (int b = 0; b < r.dim; ++b) r.initial[b] = r.gram[b * r.dim + dyn.hw_index] * r.weight[0];
  return r;
}

void run_trial(const GroupDynamics& dyn, const DenseAlgebra& alg, const Readout& ro, const MCConfig& cfg,
               std::uint64_t trial, double* out) {
  DriverConfig drv{cfg.base_seed, cfg.dt, cfg.steps, std::max(1, dyn.noise_dims)};
  std::vector<double> inc = brownian_increments(drv, trial);
  const int gs = alg.size();
  std::vector<double> v(static_cast<std::size_t>(dyn.dim) * gs, 0.0), t1, t2;
  v[dyn.hw_index * gs] = 1.0;
  // Q_T e = E_1 ... E_n e: apply the last increment first.
  for (int k = cfg.steps - 1; k >= 0; --k)
    apply_step_exp(dyn, alg, cfg.dt, &inc[static_cast<std::size_t>(k) * drv.dims], v, t1, t2);
  std::vector<double> integrated(dyn.dim, 0.0);
  for (int b = 0; b < dyn.dim; ++b)
    for (int mask = 0; mask < gs; ++mask) integrated[b] += ro.weight[mask] * v[b * gs + mask];
  for (int b = 0; b < dyn.dim; ++b) {
    double acc = 0.0;
    for (int j = 0; j < dyn.dim; ++j) acc += ro.gram[b * dyn.dim + j] * integrated[j];
    out[b] = acc - ro.initial[b];
  }
}

}  // namespace

std::vector<double> mc_trial_deltas_serial(const ModelSpec& m, const MCConfig& cfg) {
  GroupDynamics dyn = compile_dynamics(m, cfg.twice_level);
  DenseAlgebra alg(dyn.n_gens);
  Readout ro = make_readout(m, dyn, cfg.twice_level);
  std::vector<double> out(static_cast<std::size_t>(cfg.trials) * dyn.dim);
  for (int t = 0; t < cfg.trials; ++t) run_trial(dyn, alg, ro, cfg, t, &out[static_cast<std::size_t>(t) * dyn.dim]);
  return out;
}

std::vector<double> mc_trial_deltas_parallel(const ModelSpec& m, const MCConfig& cfg) {
  GroupDynamics dyn = compile_dynamics(m, cfg.twice_level);
  DenseAlgebra alg(dyn.n_gens);
  Readout ro = make_readout(m, dyn, cfg.twice_level);
  std::vector<double> out(static_cast<std::size_t>(cfg.trials) * dyn.dim);
  const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (int t = 0; t < cfg.trials; ++t) run_trial(dyn, alg, ro, cfg, t, &out[static_cast<std::size_t>(t) * dyn.dim]);
  return out;
}

CoefficientStat summarize(const std::string& name, const std::vector<double>& xs) {
  CoefficientStat s;
  s.monomial = name;
  const double n = static_cast<double>(xs.size());
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.se = xs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  s.pass = std::fabs(s.mean) <= 3.0 * s.se + 1e-12;
  return s;
}

MCReport mc_martingale(const ModelSpec& m, const MCConfig& cfg, bool parallel) {
  if (cfg.trials < 1 || cfg.steps < 0) throw UsageError("mc_martingale: need trials >= 1 and steps >= 0");
  std::vector<double> deltas = parallel ? mc_trial_deltas_parallel(m, cfg) : mc_trial_deltas_serial(m, cfg);
  TruncatedModule tm(VermaModule(m.alg, m.weights), cfg.twice_level);
  const int d = tm.dim();
  MCReport rep;
  rep.trials = cfg.trials;
  rep.verdict = true;
  for (int b = 0; b < d; ++b) {
    std::vector<double> col(cfg.trials);
    for (int t = 0; t < cfg.trials; ++t) col[t] = deltas[static_cast<std::size_t>(t) * d + b];
    rep.coefficients.push_back(summarize(monomial_string(tm.basis()[b]), col));
    rep.verdict = rep.verdict && rep.coefficients.back().pass;
  }
  return rep;
}

Complex bb_observable_value(const Jet3& j, double h, double c) {
  const Complex r = j.d1 / j.f;
  return h * r * r + (c / 12.0) * schwarzian_value<Complex>(j.d1, j.d2, j.d3);
}

std::vector<Complex> bb_observable(const std::vector<Jet3>& path, double kappa) {
  Weights w = virasoro_weights(Rational(kappa));
  const double h = w.h.get_d(), c = w.c.get_d();
  std::vector<Complex> out;
  out.reserve(path.size());
  for (const auto& j : path) {
    if (std::abs(j.f) == 0.0) throw SingularInputError("observable: f vanishes");
    out.push_back(bb_observable_value(j, h, c));
  }
  return out;
}

ObservableReport observable_mc(double kappa, Complex z, double dt, int steps, int trials, std::uint64_t seed,
                               int threads) {
  Weights w = virasoro_weights(Rational(kappa));
  const double h = w.h.get_d(), c = w.c.get_d();
  std::vector<double> re(trials), im(trials);
  std::vector<int> swallowed(trials, 0);
  const Complex obs0 = bb_observable_value(Jet3{z, 1.0, 0.0, 0.0}, h, c);
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int t = 0; t < trials; ++t) {
    DriverConfig drv{seed, dt, steps, 1};
    std::vector<double> inc = brownian_increments(drv, t);
    int sw = -1;
    std::vector<Jet3> path = simulate_classical_jet(kappa, z, dt, inc, &sw);
    Complex d = bb_observable_value(path.back(), h, c) - obs0;
    re[t] = d.real();
    im[t] = d.imag();
    swallowed[t] = sw >= 0;
  }
  ObservableReport rep;
  rep.re = summarize("re", re);
  rep.im = summarize("im", im);
  rep.initial = obs0;
  for (int s : swallowed) rep.swallowed += s;
  return rep;
}

}  // namespace ssle
