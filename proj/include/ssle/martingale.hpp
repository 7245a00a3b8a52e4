#pragma once

// Drift/noise elements of the three models, the Grassmann-integrated drift
// check, Monte Carlo constancy tests and the classical observable.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssle/loewner.hpp"
#include "ssle/superalgebra.hpp"

namespace ssle {

enum class ModelKind { Virasoro, N1, N2 };

std::string model_name(ModelKind k);
ModelKind parse_model(const std::string& s);

/// Y = sqrt(scale_sq) * unit.
struct NoiseTerm {
  Rational scale_sq;
  SuperUEA unit;
};

struct ModelSpec {
  ModelKind kind = ModelKind::Virasoro;
  Algebra alg;
  Rational kappa;
  Rational a;  // N=2 only
  Weights weights;
  int n_gens = 0;  // zeta_1 = 1, zeta_2 = 2
  SuperUEA drift;  // X as displayed in Q^{-1} dQ = X dt + sum Y_k dB_k
  std::vector<NoiseTerm> noise;
  Grassmann<Rational> pairing_weight;
  std::vector<int> berezin_order;  // measure symbols left to right
};

/// Virasoro: c = 1 - 3(k-4)^2/(2k), h = (6-k)/(2k).
Weights virasoro_weights(const Rational& kappa);
/// N=1: c = 3/2 - 6(4-k)/k, h = (12-3k)/(4k); k = 4 is degenerate.
Weights n1_weights(const Rational& kappa);

/// N=2 parameters from (t, alpha): kappa = 1/alpha, c = 3 - 3t.
struct Ns2Parameters {
  Rational kappa, a, c, h, alpha;
};
/// Relations implied by the singular vector under the graded bracket table.
Ns2Parameters ns2_derived_parameters(const Rational& t, const Rational& alpha);
/// The relations as printed (h(t, alpha) and a), kept for side-by-side reports.
Ns2Parameters ns2_printed_parameters(const Rational& t, const Rational& alpha);

ModelSpec build_model_virasoro(const Rational& kappa);
ModelSpec build_model_n1(const Rational& kappa);
ModelSpec build_model_n2(const Ns2Parameters& p);

/// X - 1/2 sum_k Y_k^2, normal ordered (the exponent drift of the group step).
std::map<Monomial, Grassmann<Rational>> group_step_drift(const ModelSpec& m);

/// Berezin integral of X|hw> (x) w at Q = Id.
VermaVector integrated_drift(const ModelSpec& m);

struct DriftReport {
  bool pass = false;
  Rational lambda;             // integrated drift = lambda * singular vector
  VermaVector drift;
  VermaVector singular_vector;
  std::string status;
  std::vector<std::string> transcript;
};

/// Template of the relevant singular vector for a model.
std::vector<Monomial> singular_template(ModelKind k);
DriftReport drift_is_null(const ModelSpec& m);

/// Sparse flow on the level-truncated module. The drift part is X - 1/2 sum Y^2.
GroupDynamics compile_dynamics(const ModelSpec& m, int twice_level);

struct CoefficientStat {
  std::string monomial;
  double mean = 0.0;
  double se = 0.0;
  bool pass = false;
};

struct MCConfig {
  std::uint64_t base_seed = 1;
  double dt = 1e-3;
  int steps = 300;
  int trials = 10000;
  int twice_level = 4;
  int threads = 0;  // 0: OpenMP default
};

struct MCReport {
  std::vector<CoefficientStat> coefficients;
  bool verdict = false;
  int trials = 0;
};

/// Per-trial deltas of the Shapovalov pairings <b| int Q_T|hw> w - <b|hw> w, row-major [trial][b].
std::vector<double> mc_trial_deltas_serial(const ModelSpec& m, const MCConfig& cfg);
std::vector<double> mc_trial_deltas_parallel(const ModelSpec& m, const MCConfig& cfg);

/// Mean / standard-error gate |mean| <= 3 SE (+1e-12 absolute slack) on each coefficient.
MCReport mc_martingale(const ModelSpec& m, const MCConfig& cfg, bool parallel = true);

/// Statistics for one scalar series.
CoefficientStat summarize(const std::string& name, const std::vector<double>& xs);

// ----------------------------------------------------------------------------
// Classical observable h (f'/f)^2 + c/12 S f.

Complex bb_observable_value(const Jet3& j, double h, double c);
std::vector<Complex> bb_observable(const std::vector<Jet3>& path, double kappa);

struct ObservableReport {
  CoefficientStat re, im;
  Complex initial;
  int swallowed = 0;
};

ObservableReport observable_mc(double kappa, Complex z, double dt, int steps, int trials, std::uint64_t seed,
                               int threads = 0);

}  // namespace ssle
