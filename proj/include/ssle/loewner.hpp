#pragma once

// Seeded Brownian drivers and Euler-Maruyama integration of the classical,
// N=1 and N=2 pointwise Loewner systems and of the representation-level flow.

#include <cstdint>
#include <random>
#include <vector>

#include "ssle/grassmann.hpp"
#include "ssle/scalar.hpp"

namespace ssle {

/// SplitMix64 finaliser applied to base + golden-ratio increment * (trial + 1).
std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t trial);

/// Uniforms from the top 53 bits of mt19937_64; normals by the Leva ratio-of-uniforms method.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double normal();

 private:
  std::mt19937_64 eng_;
};

struct DriverConfig {
  std::uint64_t base_seed = 1;
  double dt = 1e-3;
  int steps = 0;
  int dims = 1;
};

/// Increments dB[step * dims + k] ~ N(0, dt) for one trial.
std::vector<double> brownian_increments(const DriverConfig& cfg, std::uint64_t trial);
/// Component k of an interleaved increment array.
std::vector<double> component(const std::vector<double>& increments, int dims, int k);

constexpr double kSwallowEps = 1e-6;

// ----------------------------------------------------------------------------
// Classical: df = 2 dt / f - sqrt(kappa) dB.

struct ClassicalPath {
  std::vector<std::vector<Complex>> values;  // [point][step], step 0 = initial
  std::vector<int> swallowed_at;             // first step with |f| < eps, or -1
};

/// One Euler step; the operation order is shared with the Grassmann version.
inline Complex classical_step(const Complex& f, double two_dt, double noise) {
  return f + Complex(two_dt) * (Complex(1.0) / f) + Complex(noise);
}

ClassicalPath simulate_classical(double kappa, const std::vector<Complex>& z0, double dt,
                                 const std::vector<double>& dB, double eps = kSwallowEps);

/// f, f', f'', f''' at a point, propagated by the z-derivatives of the Euler step.
struct Jet3 {
  Complex f, d1, d2, d3;
};

std::vector<Jet3> simulate_classical_jet(double kappa, Complex z0, double dt, const std::vector<double>& dB,
                                         int* swallowed_at = nullptr, double eps = kSwallowEps);

// ----------------------------------------------------------------------------
// Pointwise super-SLE. Generator layout: theta (N=1) or theta+, theta- (N=2)
// first, then zeta_1, zeta_2, then any unused extra generators.

using GC = Grassmann<Complex>;

struct PointPathN1 {
  int n_gens = 0;
  std::vector<double> times;
  std::vector<GC> h0, h1;
  int swallowed_at = -1;
};

struct PointPathN2 {
  int n_gens = 0;
  std::vector<double> times;
  std::vector<GC> h0, hp, hm;
  int swallowed_at = -1;
};

/// dB has dims = 2 interleaved (B^1, B^2).
PointPathN1 simulate_n1_point(double kappa, Complex z, double dt, const std::vector<double>& dB, int extra_gens = 0,
                              double eps = kSwallowEps);
/// dB has dims = 1.
PointPathN2 simulate_n2_point(double kappa, double a, Complex z, double dt, const std::vector<double>& dB,
                              int extra_gens = 0, double eps = kSwallowEps);

// ----------------------------------------------------------------------------
// Dense real Grassmann arithmetic for the representation-level flow.

class DenseAlgebra {
 public:
  explicit DenseAlgebra(int n_gens);
  int n_gens() const { return n_; }
  int size() const { return size_; }
  /// out += s * a * b (Grassmann product of dense elements).
  void mul_add(double s, const double* a, const double* b, double* out) const;
  /// out += s * (monomial mask) * b.
  void mono_mul_add(double s, unsigned mask, const double* b, double* out) const;

 private:
  int n_, size_;
  std::vector<signed char> sign_;  // sign_[a * size + b], 0 when a & b != 0
};

/// Sparse term of a generator matrix: entry (row, col) += coef * mask-monomial, scaled by
/// dt (source 0) or by the increment of Brownian component source-1.
struct FlowTerm {
  int row = 0, col = 0;
  unsigned mask = 0;
  double coef = 0.0;
  int source = 0;
};

struct GroupDynamics {
  int dim = 0;
  int n_gens = 0;
  int noise_dims = 0;
  int hw_index = 0;
  std::vector<int> twice_level;
  std::vector<FlowTerm> terms;  // already include the Koszul signs of the convention
};

/// Dense matrix with Grassmann entries: entry (r, c) occupies [ (r*dim + c) * size, +size ).
struct GroupState {
  int dim = 0;
  int gsize = 0;
  std::vector<double> q;
};

/// Q <- Q expm(M_k), M_k = X0 dt + sum_k Y_k dB_k; serial reference implementation.
GroupState simulate_group(const GroupDynamics& dyn, double dt, const std::vector<double>& dB, int steps);

/// M v for the step matrix (sparse), v a dense Grassmann vector of length dim * size.
void apply_step_matrix(const GroupDynamics& dyn, const DenseAlgebra& alg, double dt, const double* dB,
                       const std::vector<double>& v, std::vector<double>& out);
/// v <- expm(M) v (terminating series).
void apply_step_exp(const GroupDynamics& dyn, const DenseAlgebra& alg, double dt, const double* dB,
                    std::vector<double>& v, std::vector<double>& scratch1, std::vector<double>& scratch2);

}  // namespace ssle
