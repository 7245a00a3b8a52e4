#pragma once

// Finite-generator Grassmann algebra with monomials encoded as bit sets.
//
// A monomial zeta_{i1} zeta_{i2} ... with i1 < i2 < ... is stored as the mask
// with bits (i1-1), (i2-1), ... set. Products carry the sign of the
// permutation that merges the two ascending index sequences.

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "ssle/errors.hpp"
#include "ssle/scalar.hpp"

namespace ssle {

using Mask = std::uint64_t;

inline constexpr int kMaxGenerators = 64;

inline int mask_degree(Mask m) { return std::popcount(m); }

/// Sign (+1/-1) of zeta_a * zeta_b for disjoint ascending monomials a, b.
inline int merge_sign(Mask a, Mask b) {
  int swaps = 0;
  Mask rest = b;
  while (rest) {
    int j = std::countr_zero(rest);
    rest &= rest - 1;
    Mask above = j + 1 >= 64 ? Mask{0} : (a >> (j + 1));
    swaps += std::popcount(above);
  }
  return (swaps & 1) ? -1 : 1;
}

template <class S>
class Grassmann {
 public:
  using Scalar = S;
  using Traits = ScalarTraits<S>;
  using Terms = std::map<Mask, S>;

  Grassmann() = default;
  explicit Grassmann(int num_generators) : n_(num_generators) { check_count(n_); }

  static Grassmann scalar(int n, S value) {
    Grassmann g(n);
    g.add_term(0, std::move(value));
    return g;
  }
  static Grassmann one(int n) { return scalar(n, Traits::one()); }

  /// zeta_i, 1-based.
  static Grassmann generator(int n, int i) {
    Grassmann g(n);
    g.check_index(i);
    g.terms_.emplace(Mask{1} << (i - 1), Traits::one());
    return g;
  }

  /// coef * zeta_{i1} ... zeta_{ik}; indices in any order (sign applied), repeats give 0.
  static Grassmann monomial(int n, std::span<const int> indices, S coef = Traits::one()) {
    Grassmann g = scalar(n, std::move(coef));
    for (int i : indices) g = g * generator(n, i);
    return g;
  }

  int num_generators() const { return n_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  S coefficient(Mask m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Traits::zero() : it->second;
  }

  /// Adds c * (monomial m) without sign manipulation; drops exact zeros.
  void add_term(Mask m, const S& c) {
    if (Traits::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (Traits::is_zero(it->second)) terms_.erase(it);
    }
  }

  S body() const { return coefficient(0); }
  Grassmann soul() const {
    Grassmann g = *this;
    g.terms_.erase(0);
    return g;
  }
  Grassmann even_part() const { return graded_part(0); }
  Grassmann odd_part() const { return graded_part(1); }

  /// 0 or 1 when homogeneous (zero counts as even), empty when mixed.
  std::optional<int> parity() const {
    bool has_even = false, has_odd = false;
    for (const auto& [m, c] : terms_) (mask_degree(m) & 1 ? has_odd : has_even) = true;
    if (has_even && has_odd) return std::nullopt;
    return has_odd ? 1 : 0;
  }
  bool is_even() const {
    for (const auto& [m, c] : terms_)
      if (mask_degree(m) & 1) return false;
    return true;
  }
  bool is_odd() const {
    for (const auto& [m, c] : terms_)
      if (!(mask_degree(m) & 1)) return false;
    return true;
  }
  /// Union of generators appearing in any term.
  Mask support() const {
    Mask s = 0;
    for (const auto& [m, c] : terms_) s |= m;
    return s;
  }

  /// Grade automorphism: even part minus odd part.
  Grassmann grade_involution() const {
    Grassmann g = *this;
    for (auto& [m, c] : g.terms_)
      if (mask_degree(m) & 1) c = -c;
    return g;
  }

  /// Left derivative d/dzeta_i (Berezin integral with \int dzeta zeta = 1).
  Grassmann berezin(int i) const {
    check_index(i);
    Mask bit = Mask{1} << (i - 1);
    Mask below = bit - 1;
    Grassmann g(n_);
    for (const auto& [m, c] : terms_) {
      if (!(m & bit)) continue;
      bool negative = std::popcount(m & below) & 1;
      g.add_term(m & ~bit, negative ? S(-c) : c);
    }
    return g;
  }

  /// Iterated integral \int dzeta_{order[0]} ... dzeta_{order[k-1]}; innermost (last) first.
  Grassmann berezin(std::span<const int> order) const {
    Grassmann g = *this;
    for (auto it = order.rbegin(); it != order.rend(); ++it) g = g.berezin(*it);
    return g;
  }

  /// Multiplicative inverse; requires an invertible body.
  Grassmann inverse() const {
    S b = body();
    if (Traits::is_zero(b)) throw SingularInputError("Grassmann inverse: zero body");
    S inv_b = Traits::one() / b;
    Grassmann u = soul() * inv_b;
    Grassmann result = scalar(n_, Traits::one());
    Grassmann power = result;
    bool negative = false;
    while (true) {
      power = power * u;
      if (power.is_zero()) break;
      negative = !negative;
      result += negative ? -power : power;
    }
    return result * inv_b;
  }

  Grassmann pow(int k) const {
    if (k < 0) return inverse().pow(-k);
    Grassmann r = one(n_);
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  /// Renumber generators: zeta_i -> zeta_{i+shift} inside an algebra of new_n generators.
  Grassmann embed(int new_n, int shift = 0) const {
    Grassmann g(new_n);
    for (const auto& [m, c] : terms_) {
      Mask moved = m << shift;
      if (shift > 0 && (m >> (64 - shift)) != 0) throw UsageError("embed: generator overflow");
      if (new_n < 64 && (moved >> new_n) != 0) throw UsageError("embed: target algebra too small");
      g.terms_.emplace(moved, c);
    }
    return g;
  }

  /// Drop every term containing one of the generators in `kill`.
  Grassmann project_out(Mask kill) const {
    Grassmann g(n_);
    for (const auto& [m, c] : terms_)
      if (!(m & kill)) g.terms_.emplace(m, c);
    return g;
  }

  template <class T, class F>
  Grassmann<T> convert(F&& f) const {
    Grassmann<T> g(n_);
    for (const auto& [m, c] : terms_) g.add_term(m, f(c));
    return g;
  }

  Grassmann& operator+=(const Grassmann& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Grassmann& operator-=(const Grassmann& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, S(-c));
    return *this;
  }
  Grassmann& operator*=(const S& s) {
    if (Traits::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second = s * it->second;
      if (Traits::is_zero(it->second))
        it = terms_.erase(it);
      else
        ++it;
    }
    return *this;
  }

  friend Grassmann operator+(Grassmann a, const Grassmann& b) { return a += b; }
  friend Grassmann operator-(Grassmann a, const Grassmann& b) { return a -= b; }
  friend Grassmann operator-(Grassmann a) {
    for (auto& [m, c] : a.terms_) c = -c;
    return a;
  }
  friend Grassmann operator*(Grassmann a, const S& s) { return a *= s; }
  friend Grassmann operator*(const S& s, Grassmann a) { return a *= s; }

  friend Grassmann operator*(const Grassmann& a, const Grassmann& b) {
    a.check_same(b);
    Grassmann g(a.n_);
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        if (ma & mb) continue;
        S prod = ca * cb;
        if (merge_sign(ma, mb) < 0) prod = -prod;
        g.add_term(ma | mb, prod);
      }
    }
    return g;
  }

  friend bool operator==(const Grassmann& a, const Grassmann& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

  /// Human-readable form, e.g. "1 + 2*z1z2".
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [m, c] : terms_) {
      if (!out.empty()) out += " + ";
      if constexpr (std::is_same_v<S, Rational> || std::is_same_v<S, double>)
        out += "(" + Traits::re_string(c) + ")";
      else
        out += "(" + Traits::re_string(c) + "," + Traits::im_string(c) + ")";
      for (int i = 0; i < 64; ++i)
        if (m & (Mask{1} << i)) out += "z" + std::to_string(i + 1);
    }
    return out;
  }

 private:
  static void check_count(int n) {
    if (n < 0 || n > kMaxGenerators) throw UsageError("Grassmann: generator count must be in [0, 64]");
  }
  void check_index(int i) const {
    if (i < 1 || i > n_) throw UsageError("Grassmann: generator index " + std::to_string(i) + " out of range");
  }
  void check_same(const Grassmann& o) const {
    if (n_ != o.n_) throw UsageError("Grassmann: mismatched generator counts");
  }
  Grassmann graded_part(int p) const {
    Grassmann g(n_);
    for (const auto& [m, c] : terms_)
      if ((mask_degree(m) & 1) == p) g.terms_.emplace(m, c);
    return g;
  }

  int n_ = 0;
  Terms terms_;
};

/// Taylor evaluation f(x) = sum_l soul(x)^l / l! * f^(l)(body(x)) for even x.
/// `derivatives[l]` is f^(l)(body), without the factorial.
template <class S>
Grassmann<S> eval_superanalytic(std::span<const S> derivatives, const Grassmann<S>& x) {
  using Traits = ScalarTraits<S>;
  if (!x.is_even()) throw UsageError("eval_superanalytic: argument must be even");
  const int n = x.num_generators();
  Grassmann<S> soul = x.soul();
  Grassmann<S> power = Grassmann<S>::one(n);
  Grassmann<S> result(n);
  S factorial = Traits::one();
  for (std::size_t l = 0;; ++l) {
    if (power.is_zero()) return result;
    if (l >= derivatives.size())
      throw UsageError("eval_superanalytic: Taylor data too short for the soul's nilpotency");
    if (l > 0) factorial = factorial * Traits::from_rational(Rational(static_cast<long>(l)));
    result += power * (derivatives[l] / factorial);
    power = power * soul;
  }
}

/// Multi-variable form: `partial(ls)` returns the mixed partial derivative
/// d^{l1+...+lm} f / dz1^l1 ... dzm^lm at the body point.
template <class S, class Partial>
Grassmann<S> eval_superanalytic_multi(Partial&& partial, std::span<const Grassmann<S>> args) {
  using Traits = ScalarTraits<S>;
  if (args.empty()) throw UsageError("eval_superanalytic: no arguments");
  const int n = args[0].num_generators();
  std::vector<std::vector<Grassmann<S>>> powers;  // soul^l / l! per argument
  for (const auto& a : args) {
    if (!a.is_even()) throw UsageError("eval_superanalytic: argument must be even");
    std::vector<Grassmann<S>> p{Grassmann<S>::one(n)};
    Grassmann<S> soul = a.soul();
    for (long l = 1;; ++l) {
      Grassmann<S> next = p.back() * soul * (Traits::one() / Traits::from_rational(Rational(l)));
      if (next.is_zero()) break;
      p.push_back(std::move(next));
    }
    powers.push_back(std::move(p));
  }
  Grassmann<S> result(n);
  std::vector<int> idx(args.size(), 0);
  while (true) {
    Grassmann<S> term = Grassmann<S>::scalar(n, partial(std::span<const int>(idx)));
    for (std::size_t k = 0; k < idx.size(); ++k) term = term * powers[k][idx[k]];
    result += term;
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == static_cast<int>(powers[k].size())) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return result;
}

}  // namespace ssle
