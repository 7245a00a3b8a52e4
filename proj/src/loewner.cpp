#include "ssle/loewner.hpp"

#include <cmath>

#include "ssle/errors.hpp"

namespace ssle {

std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t trial) {
  std::uint64_t z = base_seed + 0x9E3779B97F4A7C15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double NormalStream::normal() {
  // Leva (1992), ratio of uniforms with quadratic bounding curves.
  while (true) {
    double u = uniform();
    if (u == 0.0) continue;
    double v = 1.7156 * (uniform() - 0.5);
    double x = u - 0.449871;
    double y = std::fabs(v) + 0.386595;
    double q = x * x + y * (0.19600 * y - 0.25472 * x);
    if (q < 0.27597) return v / u;
    if (q > 0.27846) continue;
    if (v * v <= -4.0 * std::log(u) * u * u) return v / u;
  }
}

std::vector<double> brownian_increments(const DriverConfig& cfg, std::uint64_t trial) {
  if (cfg.dt <= 0.0 || cfg.steps < 0 || cfg.dims < 1) throw UsageError("driver: need dt > 0, steps >= 0, dims >= 1");
  NormalStream ns(mix_seed(cfg.base_seed, trial));
  const double sd = std::sqrt(cfg.dt);
  std::vector<double> out(static_cast<std::size_t>(cfg.steps) * cfg.dims);
  for (auto& x : out) x = sd * ns.normal();
  return out;
}

std::vector<double> component(const std::vector<double>& increments, int dims, int k) {
  std::vector<double> out;
  out.reserve(increments.size() / dims);
  for (std::size_t i = k; i < increments.size(); i += dims) out.push_back(increments[i]);
  return out;
}

ClassicalPath simulate_classical(double kappa, const std::vector<Complex>& z0, double dt,
                                 const std::vector<double>& dB, double eps) {
  if (kappa < 0.0) throw UsageError("simulate_classical: kappa must be >= 0");
  const double two_dt = 2.0 * dt;
  const double sk = std::sqrt(kappa);
  ClassicalPath path;
  for (const Complex& z : z0) {
    if (z.imag() == 0.0) throw UsageError("simulate_classical: starting point must have nonzero imaginary part");
    std::vector<Complex> vals{z};
    vals.reserve(dB.size() + 1);
    int swallowed = std::abs(z) < eps ? 0 : -1;
    Complex f = z;
    for (std::size_t k = 0; k < dB.size(); ++k) {
      if (swallowed < 0) {
        f = classical_step(f, two_dt, -sk * dB[k]);
        if (std::abs(f) < eps) swallowed = static_cast<int>(k + 1);
      }
      vals.push_back(f);
    }
    path.values.push_back(std::move(vals));
    path.swallowed_at.push_back(swallowed);
  }
  return path;
}

std::vector<Jet3> simulate_classical_jet(double kappa, Complex z0, double dt, const std::vector<double>& dB,
                                         int* swallowed_at, double eps) {
  const double two_dt = 2.0 * dt;
  const double sk = std::sqrt(kappa);
  std::vector<Jet3> out;
  out.reserve(dB.size() + 1);
  Jet3 j{z0, 1.0, 0.0, 0.0};
  out.push_back(j);
  int swallowed = -1;
  for (std::size_t k = 0; k < dB.size(); ++k) {
    if (swallowed < 0) {
      const Complex inv = 1.0 / j.f;
      const Complex inv2 = inv * inv, inv3 = inv2 * inv, inv4 = inv3 * inv;
      Jet3 n;
      n.f = classical_step(j.f, two_dt, -sk * dB[k]);
      n.d1 = j.d1 - two_dt * j.d1 * inv2;
      n.d2 = j.d2 - two_dt * (j.d2 * inv2 - 2.0 * j.d1 * j.d1 * inv3);
      n.d3 = j.d3 - two_dt * (j.d3 * inv2 - 6.0 * j.d1 * j.d2 * inv3 + 6.0 * j.d1 * j.d1 * j.d1 * inv4);
      j = n;
      if (std::abs(j.f) < eps) swallowed = static_cast<int>(k + 1);
    }
    out.push_back(j);
  }
  if (swallowed_at) *swallowed_at = swallowed;
  return out;
}

PointPathN1 simulate_n1_point(double kappa, Complex z, double dt, const std::vector<double>& dB, int extra_gens,
                              double eps) {
  if (kappa <= 0.0) throw UsageError("simulate_n1_point: kappa must be > 0");
  if (dB.size() % 2) throw UsageError("simulate_n1_point: driver must have two components");
  const int n = 3 + extra_gens;
  const GC th = GC::generator(n, 1), z1 = GC::generator(n, 2), z2 = GC::generator(n, 3);
  const double two_dt = 2.0 * dt;
  const double sk = std::sqrt(kappa), s2 = std::sqrt(kappa / 2.0);
  PointPathN1 path;
  path.n_gens = n;
  GC h0 = GC::scalar(n, z), h1 = th;
  path.times.push_back(0.0);
  path.h0.push_back(h0);
  path.h1.push_back(h1);
  const std::size_t steps = dB.size() / 2;
  for (std::size_t k = 0; k < steps; ++k) {
    if (path.swallowed_at < 0) {
      const double b1 = dB[2 * k], b2 = dB[2 * k + 1];
      const GC inv = h0.inverse();
      GC n0 = h0 + Complex(two_dt) * inv;
      n0 += GC::scalar(n, Complex(-sk * b1));
      n0 += (z1 * h1 + z2 * h1 * inv) * Complex(s2 * b2);
      GC drift1 = -(h1 * inv) + Complex(kappa / 4.0) * (z2 * z1 * h1 * inv * inv);
      GC n1 = h1 + drift1 * Complex(dt) + (-z1 - z2 * inv) * Complex(s2 * b2);
      h0 = std::move(n0);
      h1 = std::move(n1);
      if (std::abs(h0.body()) < eps) path.swallowed_at = static_cast<int>(k + 1);
    }
    path.times.push_back(static_cast<double>(k + 1) * dt);
    path.h0.push_back(h0);
    path.h1.push_back(h1);
  }
  return path;
}

PointPathN2 simulate_n2_point(double kappa, double a, Complex z, double dt, const std::vector<double>& dB,
                              int extra_gens, double eps) {
  if (kappa <= 0.0) throw UsageError("simulate_n2_point: kappa must be > 0");
  const int n = 4 + extra_gens;
  const GC tp = GC::generator(n, 1), tm = GC::generator(n, 2);
  const GC z1 = GC::generator(n, 3), z2 = GC::generator(n, 4);
  const double sk = std::sqrt(kappa);
  PointPathN2 path;
  path.n_gens = n;
  GC h0 = GC::scalar(n, z), hp = tp, hm = tm;
  path.times.push_back(0.0);
  path.h0.push_back(h0);
  path.hp.push_back(hp);
  path.hm.push_back(hm);
  for (std::size_t k = 0; k < dB.size(); ++k) {
    if (path.swallowed_at < 0) {
      const double b = dB[k];
      const GC inv = h0.inverse();
      GC n0 = h0 + GC::scalar(n, Complex(-dt)) + (z1 * hp + z2 * hm) * Complex(sk * b);
      GC np = hp + (hp * inv) * Complex(-a * dt) + z2 * Complex(-sk * b);
      GC nm = hm + (hm * inv) * Complex(a * dt) + z1 * Complex(-sk * b);
      h0 = std::move(n0);
      hp = std::move(np);
      hm = std::move(nm);
      if (std::abs(h0.body()) < eps) path.swallowed_at = static_cast<int>(k + 1);
    }
    path.times.push_back(static_cast<double>(k + 1) * dt);
    path.h0.push_back(h0);
    path.hp.push_back(hp);
    path.hm.push_back(hm);
  }
  return path;
}

// ----------------------------------------------------------------------------

DenseAlgebra::DenseAlgebra(int n_gens) : n_(n_gens), size_(1 << n_gens) {
  if (n_gens < 0 || n_gens > 8) throw UsageError("DenseAlgebra: supports up to 8 generators");
  sign_.assign(static_cast<std::size_t>(size_) * size_, 0);
  for (int a = 0; a < size_; ++a)
    for (int b = 0; b < size_; ++b)
      if (!(a & b)) sign_[a * size_ + b] = static_cast<signed char>(merge_sign(a, b));
}

void DenseAlgebra::mul_add(double s, const double* a, const double* b, double* out) const {
  for (int i = 0; i < size_; ++i) {
    if (a[i] == 0.0) continue;
    const double ai = s * a[i];
    const signed char* row = &sign_[i * size_];
    for (int j = 0; j < size_; ++j)
      if (row[j] && b[j] != 0.0) out[i | j] += row[j] * ai * b[j];
  }
}

void DenseAlgebra::mono_mul_add(double s, unsigned mask, const double* b, double* out) const {
  const signed char* row = &sign_[mask * size_];
  for (int j = 0; j < size_; ++j)
    if (row[j] && b[j] != 0.0) out[mask | j] += row[j] * s * b[j];
}

void apply_step_matrix(const GroupDynamics& dyn, const DenseAlgebra& alg, double dt, const double* dB,
                       const std::vector<double>& v, std::vector<double>& out) {
  const int gs = alg.size();
  out.assign(v.size(), 0.0);
  for (const FlowTerm& t : dyn.terms) {
    const double factor = t.source == 0 ? dt : dB[t.source - 1];
    alg.mono_mul_add(t.coef * factor, t.mask, &v[t.col * gs], &out[t.row * gs]);
  }
}

void apply_step_exp(const GroupDynamics& dyn, const DenseAlgebra& alg, double dt, const double* dB,
                    std::vector<double>& v, std::vector<double>& term, std::vector<double>& next) {
  term = v;
  for (int j = 1; j <= dyn.dim + 1; ++j) {
    apply_step_matrix(dyn, alg, dt, dB, term, next);
    bool zero = true;
    const double inv = 1.0 / j;
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] *= inv;
      zero = zero && next[i] == 0.0;
      v[i] += next[i];
    }
    if (zero) return;
    term.swap(next);
  }
}

GroupState simulate_group(const GroupDynamics& dyn, double dt, const std::vector<double>& dB, int steps) {
  DenseAlgebra alg(dyn.n_gens);
  const int d = dyn.dim, gs = alg.size();
  if (static_cast<long>(dB.size()) < static_cast<long>(steps) * dyn.noise_dims)
    throw UsageError("simulate_group: driver too short");
  GroupState st{d, gs, std::vector<double>(static_cast<std::size_t>(d) * d * gs, 0.0)};
  for (int i = 0; i < d; ++i) st.q[(i * d + i) * gs] = 1.0;
  std::vector<double> e(static_cast<std::size_t>(d) * d * gs);
  std::vector<double> col, t1, t2;
  for (int k = 0; k < steps; ++k) {
    const double* inc = dyn.noise_dims ? &dB[static_cast<std::size_t>(k) * dyn.noise_dims] : nullptr;
    // Columns of expm(M_k).
    for (int c = 0; c < d; ++c) {
      col.assign(static_cast<std::size_t>(d) * gs, 0.0);
      col[c * gs] = 1.0;
      apply_step_exp(dyn, alg, dt, inc, col, t1, t2);
      for (int r = 0; r < d; ++r)
        for (int g = 0; g < gs; ++g) e[(r * d + c) * gs + g] = col[r * gs + g];
    }
    std::vector<double> next(st.q.size(), 0.0);
    for (int i = 0; i < d; ++i)
      for (int kk = 0; kk < d; ++kk)
        for (int j = 0; j < d; ++j)
          alg.mul_add(1.0, &st.q[(i * d + kk) * gs], &e[(kk * d + j) * gs], &next[(i * d + j) * gs]);
    st.q.swap(next);
  }
  return st;
}

}  // namespace ssle
