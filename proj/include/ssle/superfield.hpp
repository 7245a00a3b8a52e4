#pragma once

// Formal superconformal maps with Grassmann coefficients.
//
// The odd coordinates theta (N=1) or theta+, theta- (N=2) are realised as the
// first Grassmann generators of the coefficient algebra, followed by the
// coefficient generators zeta_1, zeta_2, .... A superfield component is then a
// single PowerSeries whose coefficients may contain theta; d/dtheta is the left
// Berezin derivative on that generator and products carry all Koszul signs.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ssle/series.hpp"

namespace ssle {

struct SuperLayout {
  int n_theta = 1;  // 1 for N=1, 2 for N=2
  int n_zeta = 2;

  int total() const { return n_theta + n_zeta; }
  /// Grassmann index of theta (N=1) / theta+ (k=1) / theta- (k=2).
  int theta(int k = 1) const { return k; }
  /// Grassmann index of zeta_i.
  int zeta(int i) const { return n_theta + i; }
  Mask theta_mask() const { return (Mask{1} << n_theta) - 1; }
};

inline SuperLayout layout_n1(int n_zeta = 2) { return {1, n_zeta}; }
inline SuperLayout layout_n2(int n_zeta = 2) { return {2, n_zeta}; }

enum class FieldKind {
  L1,   // L^(1)_j  (N=1 Virasoro-type field)
  G1,   // G_{j+1/2} (N=1 odd field)
  L2,   // L^(2)_j
  J2,   // J_j
  Gp2,  // G^+_{j+1/2}
  Gm2,  // G^-_{j+1/2}
};

template <class S>
struct SuperFieldN1 {
  using Series = PowerSeries<S>;
  SuperLayout layout = layout_n1();
  Series z;      // z~ = f + theta xi
  Series theta;  // theta~ = psi + theta g

  static SuperFieldN1 identity(SuperLayout lay) {
    const int n = lay.total();
    SuperFieldN1 h;
    h.layout = lay;
    h.z = Series::z_power(n, Expansion::AtInfinity, 1);
    h.theta = Series::constant(n, Expansion::AtInfinity, Grassmann<S>::generator(n, lay.theta()));
    return h;
  }

  /// Assemble (f + theta xi, psi + theta g) from theta-free component series.
  static SuperFieldN1 from_components(SuperLayout lay, const Series& f, const Series& xi, const Series& psi,
                                      const Series& g) {
    const int n = lay.total();
    Grassmann<S> th = Grassmann<S>::generator(n, lay.theta());
    SuperFieldN1 h;
    h.layout = lay;
    h.z = f + th * xi;
    h.theta = psi + th * g;
    return h;
  }

  Series f() const { return strip_theta(z); }
  Series xi() const { return strip_theta(z.berezin(layout.theta())); }
  Series psi() const { return strip_theta(theta); }
  Series g() const { return strip_theta(theta.berezin(layout.theta())); }

 private:
  Series strip_theta(const Series& s) const {
    Series r(s.num_generators(), s.expansion(), s.trunc());
    for (const auto& [e, c] : s.coeffs()) r.add(e, c.project_out(layout.theta_mask()));
    return r;
  }
};

template <class S>
struct SuperFieldN2 {
  using Series = PowerSeries<S>;
  SuperLayout layout = layout_n2();
  Series z;   // z~
  Series tp;  // theta~+
  Series tm;  // theta~-

  static SuperFieldN2 identity(SuperLayout lay) {
    const int n = lay.total();
    SuperFieldN2 h;
    h.layout = lay;
    h.z = Series::z_power(n, Expansion::AtInfinity, 1);
    h.tp = Series::constant(n, Expansion::AtInfinity, Grassmann<S>::generator(n, lay.theta(1)));
    h.tm = Series::constant(n, Expansion::AtInfinity, Grassmann<S>::generator(n, lay.theta(2)));
    return h;
  }

  /// Component multiplying theta-monomial `which` (bit 0: theta+, bit 1: theta-) in output k
  /// (0: z~, 1: theta~+, 2: theta~-), with the theta factor placed on the left.
  Series component(int k, unsigned which) const {
    const Series& s = k == 0 ? z : (k == 1 ? tp : tm);
    Series d = s;
    if (which & 1u) d = d.berezin(layout.theta(1));
    if (which & 2u) d = d.berezin(layout.theta(2));
    if (which == 3u) d = -d;  // theta+ theta- F: d/dtheta- d/dtheta+ gives -F in this order
    Series r(d.num_generators(), d.expansion(), d.trunc());
    for (const auto& [e, c] : d.coeffs()) r.add(e, c.project_out(layout.theta_mask()));
    return r;
  }
};

/// Coefficients of -sum_j (A_j L_j + B_j J_j + M_{j+1/2} G_{j+1/2} + M^+ G^+ + M^- G^-), j < 0.
/// Keys are j; odd fields are indexed by j for mode j + 1/2.
template <class S>
struct VectorFieldCoeffs {
  int n_susy = 1;
  std::map<int, Grassmann<S>> A, B, M, Mp, Mm;

  bool empty() const { return A.empty() && B.empty() && M.empty() && Mp.empty() && Mm.empty(); }
  int depth() const {
    int d = 0;
    for (const auto* m : {&A, &B, &M, &Mp, &Mm})
      for (const auto& [j, c] : *m) d = std::max(d, -j);
    return d;
  }
  VectorFieldCoeffs negated() const {
    VectorFieldCoeffs v = *this;
    for (auto* m : {&v.A, &v.B, &v.M, &v.Mp, &v.Mm})
      for (auto& [j, c] : *m) c = -c;
    return v;
  }
};

// ----------------------------------------------------------------------------
// Odd derivatives.

/// D = d/dtheta + theta d/dz.
template <class S>
PowerSeries<S> apply_D(const PowerSeries<S>& f, const SuperLayout& lay) {
  const int n = lay.total();
  return f.berezin(lay.theta()) + Grassmann<S>::generator(n, lay.theta()) * f.derivative();
}

/// D^{+} = d/dtheta+ + theta- d/dz (sign = +1), D^{-} = d/dtheta- + theta+ d/dz (sign = -1).
template <class S>
PowerSeries<S> apply_Dpm(const PowerSeries<S>& f, int sign, const SuperLayout& lay) {
  const int n = lay.total();
  const int own = sign > 0 ? lay.theta(1) : lay.theta(2);
  const int other = sign > 0 ? lay.theta(2) : lay.theta(1);
  return f.berezin(own) + Grassmann<S>::generator(n, other) * f.derivative();
}

// ----------------------------------------------------------------------------
// Basis vector fields.

namespace detail {

template <class S>
Rational half(int num) {
  return make_rational(num, 2);
}

template <class S>
void check_truncation(const PowerSeries<S>& r, const PowerSeries<S>& input, int j) {
  if (!r.exact() && r.trunc() < 0)
    throw TruncationError("vector field with j=" + std::to_string(j) + " needs input truncation order >= " +
                          std::to_string(input.trunc() - r.trunc()));
}

}  // namespace detail

/// Action of a single basis vector field on a component series.
template <class S>
PowerSeries<S> apply_vector_field(FieldKind kind, int j, const PowerSeries<S>& f, const SuperLayout& lay) {
  using G = Grassmann<S>;
  using Traits = ScalarTraits<S>;
  const int n = lay.total();
  auto scal = [](const Rational& q) { return Traits::from_rational(q); };
  PowerSeries<S> r(n, f.expansion());
  switch (kind) {
    case FieldKind::L1: {
      if (lay.n_theta != 1) throw UsageError("L^(1) requires the N=1 layout");
      G th = G::generator(n, lay.theta());
      r = -(f.derivative().shifted(j + 1)) -
          scal(make_rational(j + 1, 2)) * (th * f.berezin(lay.theta())).shifted(j);
      break;
    }
    case FieldKind::G1: {
      if (lay.n_theta != 1) throw UsageError("G requires the N=1 layout");
      G th = G::generator(n, lay.theta());
      r = -((f.berezin(lay.theta()) - th * f.derivative()).shifted(j + 1));
      break;
    }
    case FieldKind::L2: {
      if (lay.n_theta != 2) throw UsageError("L^(2) requires the N=2 layout");
      G tp = G::generator(n, lay.theta(1));
      G tm = G::generator(n, lay.theta(2));
      PowerSeries<S> euler = tp * f.berezin(lay.theta(1)) + tm * f.berezin(lay.theta(2));
      r = -(f.derivative().shifted(j + 1) + scal(make_rational(j + 1, 2)) * euler.shifted(j));
      break;
    }
    case FieldKind::J2: {
      if (lay.n_theta != 2) throw UsageError("J requires the N=2 layout");
      G tp = G::generator(n, lay.theta(1));
      G tm = G::generator(n, lay.theta(2));
      r = -((tp * f.berezin(lay.theta(1)) - tm * f.berezin(lay.theta(2))).shifted(j));
      break;
    }
    case FieldKind::Gp2:
    case FieldKind::Gm2: {
      if (lay.n_theta != 2) throw UsageError("G^+- requires the N=2 layout");
      const bool plus = kind == FieldKind::Gp2;
      const int own = plus ? lay.theta(1) : lay.theta(2);
      const int other = plus ? lay.theta(2) : lay.theta(1);
      G t_other = G::generator(n, other);
      // theta^{own} theta^{other}: theta+ theta- for G^+, theta- theta+ for G^-.
      G pair = G::generator(n, own) * G::generator(n, other);
      PowerSeries<S> d_own = f.berezin(own);
      r = -((d_own - t_other * f.derivative()).shifted(j + 1) +
            scal(Rational(j + 1)) * (pair * d_own).shifted(j));
      break;
    }
  }
  detail::check_truncation(r, f, j);
  return r;
}

/// The derivation T = -sum_j (A_j L_j + ... ) applied to one component.
template <class S>
PowerSeries<S> apply_generator(const VectorFieldCoeffs<S>& v, const PowerSeries<S>& f, const SuperLayout& lay) {
  PowerSeries<S> acc(f.num_generators(), f.expansion(), f.trunc());
  auto accumulate = [&](const std::map<int, Grassmann<S>>& coeffs, FieldKind kind) {
    for (const auto& [j, c] : coeffs) acc -= c * apply_vector_field(kind, j, f, lay);
  };
  if (v.n_susy == 1) {
    accumulate(v.A, FieldKind::L1);
    accumulate(v.M, FieldKind::G1);
  } else {
    accumulate(v.A, FieldKind::L2);
    accumulate(v.B, FieldKind::J2);
    accumulate(v.Mp, FieldKind::Gp2);
    accumulate(v.Mm, FieldKind::Gm2);
  }
  return acc;
}

/// Validates parity, theta-freeness and the negative-mode window of the coefficients.
template <class S>
void validate_coeffs(const VectorFieldCoeffs<S>& v, const SuperLayout& lay) {
  if (v.n_susy != lay.n_theta) throw UsageError("vector field coefficients do not match the layout");
  auto check = [&](const std::map<int, Grassmann<S>>& m, bool odd, const char* name) {
    for (const auto& [j, c] : m) {
      if (j >= 0) throw UsageError(std::string(name) + ": only j < 0 is supported");
      if (c.num_generators() != lay.total())
        throw UsageError(std::string(name) + ": coefficient lives in the wrong algebra");
      if (c.support() & lay.theta_mask()) throw UsageError(std::string(name) + ": coefficient contains theta");
      if (odd ? !c.is_odd() : !c.is_even())
        throw UsageError(std::string(name) + (odd ? ": coefficient must be odd" : ": coefficient must be even"));
    }
  };
  check(v.A, false, "A");
  check(v.B, false, "B");
  check(v.M, true, "M");
  check(v.Mp, true, "M+");
  check(v.Mm, true, "M-");
  if (v.n_susy == 1 && !(v.B.empty() && v.Mp.empty() && v.Mm.empty()))
    throw UsageError("N=1 coefficients may only set A and M");
  if (v.n_susy == 2 && !v.M.empty()) throw UsageError("N=2 coefficients use M+ and M-, not M");
}

/// exp(T) applied to a component series, truncated at order k.
template <class S>
PowerSeries<S> exp_apply(const VectorFieldCoeffs<S>& v, const PowerSeries<S>& f, const SuperLayout& lay, int k) {
  using Traits = ScalarTraits<S>;
  PowerSeries<S> term = f.truncated(k);
  PowerSeries<S> sum = term;
  const int max_iter = 4 * k + 16;
  for (int it = 1;; ++it) {
    if (it > max_iter) throw TruncationError("exponential did not stabilise within the truncation order");
    term = (Traits::from_rational(make_rational(1, it)) * apply_generator(v, term, lay)).truncated(k);
    if (term.is_zero()) break;
    sum += term;
  }
  return sum.truncated(k);
}

template <class S>
SuperFieldN1<S> exp_superconformal_n1(const VectorFieldCoeffs<S>& v, const SuperLayout& lay, int k) {
  validate_coeffs(v, lay);
  if (v.depth() > k) throw TruncationError("coefficient support deeper than truncation order");
  SuperFieldN1<S> id = SuperFieldN1<S>::identity(lay);
  SuperFieldN1<S> h;
  h.layout = lay;
  h.z = exp_apply(v, id.z, lay, k);
  h.theta = exp_apply(v, id.theta, lay, k);
  return h;
}

template <class S>
SuperFieldN2<S> exp_superconformal_n2(const VectorFieldCoeffs<S>& v, const SuperLayout& lay, int k) {
  validate_coeffs(v, lay);
  if (v.depth() > k) throw TruncationError("coefficient support deeper than truncation order");
  SuperFieldN2<S> id = SuperFieldN2<S>::identity(lay);
  SuperFieldN2<S> h;
  h.layout = lay;
  h.z = exp_apply(v, id.z, lay, k);
  h.tp = exp_apply(v, id.tp, lay, k);
  h.tm = exp_apply(v, id.tm, lay, k);
  return h;
}

// ----------------------------------------------------------------------------
// Superconformality.

template <class S>
struct SuperconformalReport {
  bool pass = false;
  std::vector<std::string> names;
  std::vector<PowerSeries<S>> residuals;
};

/// Residual D z~ - theta~ D theta~.
template <class S>
SuperconformalReport<S> is_superconformal_n1(const SuperFieldN1<S>& h) {
  const auto& lay = h.layout;
  int k = std::min(h.z.trunc(), h.theta.trunc());
  PowerSeries<S> res = (apply_D(h.z, lay) - h.theta * apply_D(h.theta, lay)).truncated(k);
  SuperconformalReport<S> rep;
  rep.names = {"Dz - theta D theta"};
  rep.pass = res.is_zero();
  rep.residuals.push_back(std::move(res));
  return rep;
}

/// Residuals D+- z~ - theta~-+ D+- theta~+- and D+- theta~-+.
template <class S>
SuperconformalReport<S> is_superconformal_n2(const SuperFieldN2<S>& h) {
  const auto& lay = h.layout;
  int k = std::min({h.z.trunc(), h.tp.trunc(), h.tm.trunc()});
  SuperconformalReport<S> rep;
  rep.names = {"D+z - th- D+th+", "D-z - th+ D-th-", "D+ th-", "D- th+"};
  rep.residuals.push_back((apply_Dpm(h.z, +1, lay) - h.tm * apply_Dpm(h.tp, +1, lay)).truncated(k));
  rep.residuals.push_back((apply_Dpm(h.z, -1, lay) - h.tp * apply_Dpm(h.tm, -1, lay)).truncated(k));
  rep.residuals.push_back(apply_Dpm(h.tm, +1, lay).truncated(k));
  rep.residuals.push_back(apply_Dpm(h.tp, -1, lay).truncated(k));
  rep.pass = true;
  for (const auto& r : rep.residuals) rep.pass = rep.pass && r.is_zero();
  return rep;
}

/// h(z, theta) = sum_j (A_j (j+1)/2 z^j + theta M_{j+1/2} (j+1) z^j), with [D, T] = h D.
template <class S>
PowerSeries<S> commutator_multiplier_n1(const VectorFieldCoeffs<S>& v, const SuperLayout& lay) {
  using Traits = ScalarTraits<S>;
  const int n = lay.total();
  Grassmann<S> th = Grassmann<S>::generator(n, lay.theta());
  PowerSeries<S> h(n, Expansion::AtInfinity);
  for (const auto& [j, a] : v.A) h.add(j, a * Traits::from_rational(make_rational(j + 1, 2)));
  for (const auto& [j, m] : v.M) h.add(j, th * m * Traits::from_rational(Rational(j + 1)));
  return h;
}

/// Checks D(T F) - T(D F) = h D F on the test functions z^p and theta z^p, p in [-4, 3].
template <class S>
bool commutator_identity_check(const VectorFieldCoeffs<S>& v, const SuperLayout& lay) {
  validate_coeffs(v, lay);
  if (v.n_susy != 1) throw UsageError("commutator identity is implemented for N=1");
  const int n = lay.total();
  using Series = PowerSeries<S>;
  Series h = commutator_multiplier_n1(v, lay);
  Grassmann<S> th = Grassmann<S>::generator(n, lay.theta());
  for (int p = -4; p <= 3; ++p) {
    for (int with_theta = 0; with_theta < 2; ++with_theta) {
      Series f = Series::z_power(n, Expansion::AtInfinity, p);
      if (with_theta) f = th * f;
      Series lhs = apply_D(apply_generator(v, f, lay), lay) - apply_generator(v, apply_D(f, lay), lay);
      Series rhs = h * apply_D(f, lay);
      if (!(lhs - rhs).is_zero()) return false;
    }
  }
  return true;
}

// ----------------------------------------------------------------------------
// Aut O coordinates: exp(sum_{i<0} v_i z^{i+1} d/dz) v0^{z d/dz} . z = rho(z).

template <class S>
struct ExpMapCoordinates {
  Grassmann<S> v0;
  std::map<int, Grassmann<S>> v;  // keys i < 0
};

template <class S>
PowerSeries<S> apply_witt(const std::map<int, Grassmann<S>>& v, const PowerSeries<S>& f) {
  PowerSeries<S> acc(f.num_generators(), f.expansion(), f.trunc());
  PowerSeries<S> df = f.derivative();
  for (const auto& [i, c] : v) acc += c * df.shifted(i + 1);
  return acc;
}

/// v0 * exp(V) z at infinity, truncated at order k.
template <class S>
PowerSeries<S> expmap_forward(const ExpMapCoordinates<S>& coords, int k) {
  using Traits = ScalarTraits<S>;
  const int n = coords.v0.num_generators();
  PowerSeries<S> term = PowerSeries<S>::z_power(n, Expansion::AtInfinity, 1).truncated(k);
  PowerSeries<S> sum = term;
  for (int it = 1; it <= 4 * k + 16; ++it) {
    term = (Traits::from_rational(make_rational(1, it)) * apply_witt(coords.v, term)).truncated(k);
    if (term.is_zero()) break;
    sum += term;
  }
  return coords.v0 * sum;
}

template <class S>
ExpMapCoordinates<S> expmap_coordinates(const PowerSeries<S>& rho) {
  if (rho.expansion() != Expansion::AtInfinity) throw UsageError("expmap_coordinates: series must be at infinity");
  if (!rho.is_even()) throw UsageError("expmap_coordinates: series must be even");
  const int n = rho.num_generators();
  if (rho.is_zero() || rho.max_power() > 1) throw SingularInputError("expmap_coordinates: not of Aut O shape");
  Grassmann<S> b1 = rho.coefficient(1);
  if (ScalarTraits<S>::is_zero(b1.body())) throw SingularInputError("expmap_coordinates: b1 has zero body");
  const int k = rho.exact() ? std::max(0, -rho.min_power()) : rho.trunc();
  ExpMapCoordinates<S> out;
  out.v0 = b1;
  PowerSeries<S> sigma = b1.inverse() * rho;
  ExpMapCoordinates<S> unit{Grassmann<S>::one(n), {}};
  for (int i = -1; i >= -(k + 1); --i) {
    PowerSeries<S> current = expmap_forward(unit, k);
    Grassmann<S> vi = sigma.coefficient(i + 1) - current.coefficient(i + 1);
    if (!vi.is_zero()) unit.v[i] = vi;
  }
  out.v = unit.v;
  return out;
}

// ----------------------------------------------------------------------------
// Schwarzian derivative rho'''/rho' - 3/2 (rho''/rho')^2.

template <class S>
S schwarzian_value(const S& d1, const S& d2, const S& d3) {
  using Traits = ScalarTraits<S>;
  if (Traits::is_zero(d1)) throw SingularInputError("schwarzian: vanishing first derivative");
  S r = d2 / d1;
  return d3 / d1 - Traits::from_rational(make_rational(3, 2)) * r * r;
}

template <class S>
PowerSeries<S> schwarzian(const PowerSeries<S>& rho, int order = kDefaultOrder) {
  PowerSeries<S> d1 = rho.derivative();
  if (d1.is_zero() || d1.leading_power() != 0 ||
      ScalarTraits<S>::is_zero(d1.coefficient(0).body()))
    throw SingularInputError("schwarzian: rho' not invertible at the expansion point");
  PowerSeries<S> inv = d1.reciprocal(order);
  PowerSeries<S> d2 = d1.derivative();
  PowerSeries<S> d3 = d2.derivative();
  PowerSeries<S> r = d2 * inv;
  return d3 * inv - ScalarTraits<S>::from_rational(make_rational(3, 2)) * (r * r);
}

}  // namespace ssle
