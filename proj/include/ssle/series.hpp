#pragma once

// Truncated formal Laurent series in z with Grassmann coefficients.
//
// A series tagged AtInfinity with truncation order K is known modulo
// O(z^{-K-1}); one tagged AtZero is known modulo O(z^{K+1}). kExact marks a
// series known exactly (a Laurent polynomial).

#include <algorithm>
#include <climits>
#include <map>
#include <string>

#include "ssle/errors.hpp"
#include "ssle/grassmann.hpp"

namespace ssle {

enum class Expansion { AtInfinity, AtZero };

inline constexpr int kExact = INT_MAX / 4;
inline constexpr int kDefaultOrder = 16;

inline const char* expansion_name(Expansion e) { return e == Expansion::AtInfinity ? "inf" : "0"; }

template <class S>
class PowerSeries {
 public:
  using G = Grassmann<S>;
  using Traits = ScalarTraits<S>;
  using Coeffs = std::map<int, G>;

  PowerSeries() = default;
  PowerSeries(int num_generators, Expansion e, int trunc = kExact)
      : n_(num_generators), exp_(e), trunc_(trunc) {}

  static PowerSeries monomial(int n, Expansion e, int power, G coef, int trunc = kExact) {
    PowerSeries p(n, e, trunc);
    p.add(power, coef);
    return p;
  }
  /// z^power with unit coefficient.
  static PowerSeries z_power(int n, Expansion e, int power = 1) {
    return monomial(n, e, power, G::one(n));
  }
  static PowerSeries constant(int n, Expansion e, G c) { return monomial(n, e, 0, std::move(c)); }

  int num_generators() const { return n_; }
  Expansion expansion() const { return exp_; }
  int trunc() const { return trunc_; }
  bool exact() const { return trunc_ >= kExact; }
  const Coeffs& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }

  G coefficient(int power) const {
    auto it = coeffs_.find(power);
    return it == coeffs_.end() ? G(n_) : it->second;
  }

  /// Whether z^power lies inside the known range.
  bool in_range(int power) const {
    if (exact()) return true;
    return exp_ == Expansion::AtInfinity ? power >= -trunc_ : power <= trunc_;
  }

  void add(int power, const G& c) {
    if (c.num_generators() != n_) throw UsageError("PowerSeries: coefficient algebra mismatch");
    if (c.is_zero() || !in_range(power)) return;
    auto [it, inserted] = coeffs_.try_emplace(power, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) coeffs_.erase(it);
    }
  }

  /// Tighten the truncation order, dropping coefficients outside it.
  PowerSeries truncated(int k) const {
    PowerSeries p(n_, exp_, std::min(trunc_, k));
    for (const auto& [e, c] : coeffs_) p.add(e, c);
    return p;
  }

  /// Highest exponent present (AtInfinity leading term); requires non-zero.
  int max_power() const {
    if (coeffs_.empty()) throw UsageError("PowerSeries: zero series has no degree");
    return coeffs_.rbegin()->first;
  }
  /// Lowest exponent present (AtZero valuation); requires non-zero.
  int min_power() const {
    if (coeffs_.empty()) throw UsageError("PowerSeries: zero series has no valuation");
    return coeffs_.begin()->first;
  }

  /// Leading coefficient for the expansion point: highest power at infinity, lowest at zero.
  int leading_power() const { return exp_ == Expansion::AtInfinity ? max_power() : min_power(); }

  bool is_even() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const auto& kv) { return kv.second.is_even(); });
  }
  bool is_odd() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const auto& kv) { return kv.second.is_odd(); });
  }

  PowerSeries& operator+=(const PowerSeries& o) {
    check_same(o);
    trunc_ = std::min(trunc_, o.trunc_);
    Coeffs old;
    old.swap(coeffs_);
    for (const auto& [e, c] : old) add(e, c);
    for (const auto& [e, c] : o.coeffs_) add(e, c);
    return *this;
  }
  PowerSeries& operator-=(const PowerSeries& o) { return *this += -o; }
  friend PowerSeries operator+(PowerSeries a, const PowerSeries& b) { return a += b; }
  friend PowerSeries operator-(PowerSeries a, const PowerSeries& b) { return a -= b; }
  friend PowerSeries operator-(PowerSeries a) {
    for (auto& [e, c] : a.coeffs_) c = -c;
    return a;
  }

  /// Left multiplication by a Grassmann constant.
  friend PowerSeries operator*(const G& g, const PowerSeries& p) {
    PowerSeries r(p.n_, p.exp_, p.trunc_);
    for (const auto& [e, c] : p.coeffs_) r.add(e, g * c);
    return r;
  }
  friend PowerSeries operator*(const PowerSeries& p, const G& g) {
    PowerSeries r(p.n_, p.exp_, p.trunc_);
    for (const auto& [e, c] : p.coeffs_) r.add(e, c * g);
    return r;
  }
  friend PowerSeries operator*(const S& s, const PowerSeries& p) {
    PowerSeries r(p.n_, p.exp_, p.trunc_);
    for (const auto& [e, c] : p.coeffs_) r.add(e, c * s);
    return r;
  }

  friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
    a.check_same(b);
    PowerSeries r(a.n_, a.exp_, product_trunc(a, b));
    for (const auto& [ea, ca] : a.coeffs_) {
      for (const auto& [eb, cb] : b.coeffs_) {
        if (!r.in_range(ea + eb)) continue;
        r.add(ea + eb, ca * cb);
      }
    }
    return r;
  }

  /// Multiply by z^k.
  PowerSeries shifted(int k) const {
    int t = trunc_;
    if (!exact()) t = exp_ == Expansion::AtInfinity ? trunc_ - k : trunc_ + k;
    PowerSeries r(n_, exp_, t);
    for (const auto& [e, c] : coeffs_) r.add(e + k, c);
    return r;
  }

  /// d/dz.
  PowerSeries derivative() const {
    int t = trunc_;
    if (!exact()) t = exp_ == Expansion::AtInfinity ? trunc_ + 1 : trunc_ - 1;
    PowerSeries r(n_, exp_, t);
    for (const auto& [e, c] : coeffs_)
      if (e != 0) r.add(e - 1, c * Traits::from_rational(Rational(e)));
    return r;
  }

  /// Coefficientwise left derivative by Grassmann generator i.
  PowerSeries berezin(int i) const {
    PowerSeries r(n_, exp_, trunc_);
    for (const auto& [e, c] : coeffs_) r.add(e, c.berezin(i));
    return r;
  }

  /// Multiplicative inverse of an even series, computed to at most `order`.
  PowerSeries reciprocal(int order = kDefaultOrder) const {
    if (coeffs_.empty()) throw SingularInputError("reciprocal of zero series");
    if (!is_even()) throw UsageError("reciprocal requires an even series");
    const bool at_inf = exp_ == Expansion::AtInfinity;
    const int d = leading_power();
    const G lead = coeffs_.at(d);
    if (Traits::is_zero(lead.body())) throw SingularInputError("reciprocal: leading coefficient has zero body");
    const G lead_inv = lead.inverse();
    // Relative depth to which the input is known below (above) its leading term.
    int depth = exact() ? kExact : (at_inf ? trunc_ + d : trunc_ - d);
    int target = at_inf ? std::min(order, exact() ? kExact : trunc_ + 2 * d)
                        : std::min(order, exact() ? kExact : trunc_ - 2 * d);
    int steps = at_inf ? target - d : target + d;  // number of coefficients below (above) -d
    steps = std::min(steps, depth);
    if (steps < 0) throw TruncationError("reciprocal: input truncation too shallow");
    PowerSeries r(n_, exp_, target);
    std::map<int, G> g;  // g[k] is the coefficient at relative offset k from -d
    const int sign = at_inf ? -1 : 1;
    g[0] = lead_inv;
    for (int k = 1; k <= steps; ++k) {
      G acc(n_);
      for (int j = 1; j <= k; ++j) {
        auto it = coeffs_.find(d + sign * j);
        if (it == coeffs_.end()) continue;
        acc += it->second * g[k - j];
      }
      g[k] = -(lead_inv * acc);
    }
    for (const auto& [k, c] : g) r.add(-d + sign * k, c);
    return r;
  }

  /// Evaluate this series at another series: this(inner(z)).
  PowerSeries compose(const PowerSeries& inner, int order = kDefaultOrder) const;

  /// Compositional inverse of a series b z + (lower) at infinity or a z + (higher) at zero.
  PowerSeries invert(int order = kDefaultOrder) const;

  /// Equality of all coefficients inside the common known range.
  bool equal_to_order(const PowerSeries& o) const {
    check_same(o);
    PowerSeries diff = *this - o;
    return diff.is_zero();
  }

  friend bool operator==(const PowerSeries& a, const PowerSeries& b) {
    return a.n_ == b.n_ && a.exp_ == b.exp_ && a.trunc_ == b.trunc_ && a.coeffs_ == b.coeffs_;
  }

  std::string to_string() const {
    std::string out;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
      if (!out.empty()) out += " + ";
      out += "[" + it->second.to_string() + "] z^" + std::to_string(it->first);
    }
    if (out.empty()) out = "0";
    if (!exact()) out += " + O(z^" + std::to_string(exp_ == Expansion::AtInfinity ? -trunc_ - 1 : trunc_ + 1) + ")";
    return out;
  }

 private:
  void check_same(const PowerSeries& o) const {
    if (n_ != o.n_) throw UsageError("PowerSeries: mismatched coefficient algebras");
    if (exp_ != o.exp_) throw UsageError("PowerSeries: mixing expansions at infinity and at zero");
  }

  static int product_trunc(const PowerSeries& a, const PowerSeries& b) {
    const bool at_inf = a.exp_ == Expansion::AtInfinity;
    auto one_side = [&](const PowerSeries& lossy, const PowerSeries& other) {
      if (lossy.exact()) return kExact;
      if (other.is_zero()) return other.exact() ? kExact : lossy.trunc_;
      return at_inf ? lossy.trunc_ - other.max_power() : lossy.trunc_ + other.min_power();
    };
    return std::min(one_side(a, b), one_side(b, a));
  }

  int n_ = 0;
  Expansion exp_ = Expansion::AtInfinity;
  int trunc_ = kExact;
  Coeffs coeffs_;
};

template <class S>
PowerSeries<S> PowerSeries<S>::compose(const PowerSeries& inner, int order) const {
  check_same(inner);
  const bool at_inf = exp_ == Expansion::AtInfinity;
  PowerSeries result(n_, exp_, kExact);
  if (coeffs_.empty()) return truncated(trunc_);
  if (!inner.is_even()) throw UsageError("compose: inner series must be even");
  if (at_inf) {
    if (inner.is_zero() || inner.max_power() != 1)
      throw SingularInputError("compose at infinity: inner series must have the form b1 z + ...");
    if (Traits::is_zero(inner.coefficient(1).body()))
      throw SingularInputError("compose at infinity: b1 has zero body");
    int t = order;
    if (!exact()) t = std::min(t, trunc_);
    if (!inner.exact()) t = std::min(t, inner.trunc_ - max_power() + 1);
    PowerSeries pos = PowerSeries::z_power(n_, exp_, 0).truncated(t);
    PowerSeries neg = pos;
    PowerSeries inv = inner.reciprocal(t + 1).truncated(t + 1);
    PowerSeries acc(n_, exp_, t);
    for (int p = 0; p <= std::max(0, max_power()); ++p) {
      if (p > 0) pos = (pos * inner).truncated(t);
      acc += (coefficient(p) * pos).truncated(t);
    }
    for (int p = -1; p >= min_power(); --p) {
      neg = (neg * inv).truncated(t);
      acc += (coefficient(p) * neg).truncated(t);
    }
    return acc.truncated(t);
  }
  // At zero.
  const bool inner_vanishes = inner.is_zero() || inner.min_power() >= 1;
  if (min_power() < 0) {
    if (inner.is_zero() || inner.min_power() != 1 || Traits::is_zero(inner.coefficient(1).body()))
      throw SingularInputError("compose at zero: negative powers need inner = a1 z + ... with a1 invertible");
  }
  if (!exact() && !inner_vanishes)
    throw UsageError("compose at zero: truncated outer series needs an inner series vanishing at 0");
  int t = order;
  if (!exact()) {
    int v = inner.is_zero() ? 1 : std::max(1, inner.min_power());
    t = std::min(t, (trunc_ + 1) * v - 1);
  }
  if (!inner.exact()) {
    int nmin = 0;
    for (const auto& [e, c] : coeffs_)
      if (e != 0) {
        nmin = e;
        break;
      }
    int v = inner.is_zero() ? 1 : inner.min_power();
    t = std::min(t, inner.trunc_ + (nmin - 1) * v);
  }
  PowerSeries acc(n_, exp_, t);
  PowerSeries pos = PowerSeries::z_power(n_, exp_, 0).truncated(t);
  for (int p = 0; p <= std::max(0, max_power()); ++p) {
    if (p > 0) pos = (pos * inner).truncated(t);
    acc += (coefficient(p) * pos).truncated(t);
  }
  if (min_power() < 0) {
    PowerSeries inv = inner.reciprocal(t + 2);
    PowerSeries neg = PowerSeries::z_power(n_, exp_, 0).truncated(t);
    for (int p = -1; p >= min_power(); --p) {
      neg = (neg * inv).truncated(t);
      acc += (coefficient(p) * neg).truncated(t);
    }
  }
  return acc.truncated(t);
}

template <class S>
PowerSeries<S> PowerSeries<S>::invert(int order) const {
  if (!is_even()) throw UsageError("invert: series must be even");
  const bool at_inf = exp_ == Expansion::AtInfinity;
  if (coeffs_.empty() || coefficient(1).is_zero())
    throw SingularInputError("invert: missing linear coefficient");
  if (at_inf && max_power() != 1) throw SingularInputError("invert at infinity: series must be b1 z + lower");
  if (!at_inf && min_power() != 1)
    throw SingularInputError("invert at zero: series must be a1 z + higher (no constant term)");
  const G lin = coefficient(1);
  if (Traits::is_zero(lin.body())) throw SingularInputError("invert: linear coefficient has zero body");
  const G lin_inv = lin.inverse();
  int t = std::min(order, trunc_);
  PowerSeries rest = *this - monomial(n_, exp_, 1, lin);
  PowerSeries w = z_power(n_, exp_, 1);
  PowerSeries sigma = (lin_inv * w).truncated(t);
  // Each fixed-point sweep fixes one more order.
  int sweeps = (at_inf ? t + 2 : t + 1) + 1;
  for (int i = 0; i < sweeps; ++i) {
    PowerSeries next = (lin_inv * (w - rest.compose(sigma, t))).truncated(t);
    if (next == sigma) break;
    sigma = std::move(next);
  }
  return sigma;
}

}  // namespace ssle
