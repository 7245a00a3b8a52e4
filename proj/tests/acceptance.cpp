// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include "ssle/loewner.hpp"
#include "ssle/martingale.hpp"
#include "ssle/rational_linalg.hpp"
#include "ssle/superfield.hpp"

using namespace ssle;
using GR = Grassmann<Rational>;
using P = PowerSeries<Rational>;

namespace {

// Pinned settings.
constexpr double kExactBudgetSeconds = 1.0;   // criteria 1, 2
constexpr double kSlopeTarget = 1.0;          // criterion 7
constexpr double kSlopeTolerance = 0.15;
constexpr double kClassicalBudgetSeconds = 10.0;
constexpr double kObsDt = 1e-4;               // criterion 8
constexpr double kObsHorizon = 0.2;
constexpr int kObsTrials = 10000;
constexpr double kMcDt = 1e-3;                // criterion 9
constexpr int kMcSteps = 300;
constexpr int kMcTrials = 10000;
constexpr int kMcSeeds = 20;
constexpr int kMcRequired = 18;
constexpr int kSuperconformalCases = 100;     // criterion 5
constexpr int kSuperconformalOrder = 12;
constexpr int kSuperconformalDepth = 6;
constexpr int kExpmapCases = 100;             // criterion 6
constexpr int kExpmapOrder = 10;

int failures = 0;

void report(int n, const std::string& title, bool pass, const std::string& detail) {
  std::cout << "criterion " << n << " [" << title << "]: " << (pass ? "PASS" : "FAIL") << "  " << detail << "\n";
  std::cout.flush();
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Rational random_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-40, 40), den(1, 17);
  Rational q;
  do q = Rational(num(rng), den(rng)); while (sgn(q) == 0);
  q.canonicalize();
  return q;
}

std::vector<Monomial> ns1_template() { return {{L(-2)}, {L(-1), L(-1)}, {G(-3), G(-1)}}; }

// 1 ---------------------------------------------------------------------------
void criterion_1() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  bool ok = true;
  std::ostringstream d;
  for (int i = 0; i < 5; ++i) {
    Rational h = random_rational(rng);
    Rational c = Rational(3, 2) * (1 - 16 * h / 3);
    Rational a = -3 / (4 * h);
    VermaModule mod(ns1(), {c, h, 0});
    VermaVector v;
    verma_add(v, {L(-2)}, 1);
    verma_add(v, {L(-1), L(-1)}, a);
    verma_add(v, {G(-3), G(-1)}, -a);
    SingularReport r = is_singular(mod, v);
    ok = ok && r.pass;
    d << "h=" << h << (r.pass ? " ok; " : " FAILED; ");
  }
  const double s = seconds_since(t0);
  d << "time " << s << " s";
  report(1, "ns1 singular vector, random h", ok && s < kExactBudgetSeconds, d.str());
}

// 2 ---------------------------------------------------------------------------
void criterion_2() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::ostringstream d;
  for (Rational k : {Rational(2), Rational(8, 3), Rational(3), Rational(4), Rational(6)}) {
    VermaModule mod(virasoro(), virasoro_weights(k));
    VermaVector v;
    verma_add(v, {L(-2)}, -2);
    verma_add(v, {L(-1), L(-1)}, k / 2);
    bool p = is_singular(mod, v).pass;
    ok = ok && p;
    d << "kappa=" << k << (p ? " ok; " : " FAILED; ");
  }
  const double s = seconds_since(t0);
  d << "time " << s << " s";
  report(2, "Virasoro level-2 vector", ok && s < kExactBudgetSeconds, d.str());
}

// 3 ---------------------------------------------------------------------------
void criterion_3() {
  std::ostringstream d;
  bool ok = true;
  // ns1: exact recovery at sampled h, then an independent rational fit of a(h), c(h).
  RVector hs, as, cs;
  for (int i = 1; i <= 9; ++i) {
    const Rational h = make_rational(i * 7 - 30, 11);
    if (sgn(h) == 0) continue;
    SingularSolution s = solve_singular_params(ns1(), ns1_template(), h);
    const Rational a = -3 / (4 * h);
    const bool hit = s.found && s.coefficients[1] == a && s.coefficients[2] == -a &&
                     s.c == Rational(3, 2) * (1 - 16 * h / 3);
    ok = ok && hit;
    if (s.found) {
      hs.push_back(h);
      as.push_back(s.coefficients[1]);
      cs.push_back(s.c);
    }
  }
  auto fa = fit_rational_function(hs, as), fc = fit_rational_function(hs, cs);
  const bool fits = fa && fc;
  ok = ok && fits;
  if (fits) d << "ns1: a(h) = " << fa->to_string("h") << ", c(h) = " << fc->to_string("h") << "; ";
  // ns2 (graded table): self-consistency of the solved relation over a grid.
  int n2 = 0, n2ok = 0, printed_agree = 0;
  for (Rational t : {Rational(1, 3), Rational(-2), Rational(5, 4)})
    for (Rational al : {Rational(1, 2), Rational(2), Rational(-3), Rational(3, 5)}) {
      Ns2Parameters der = ns2_derived_parameters(t, al), pr = ns2_printed_parameters(t, al);
      SingularSolution s = solve_singular_params(ns2(NS2Table::Standard), singular_template(ModelKind::N2), der.h, al);
      ++n2;
      bool good = s.found && s.c == der.c;
      if (good) {
        VermaVector v;
        auto templ = singular_template(ModelKind::N2);
        for (std::size_t i = 0; i < templ.size(); ++i) verma_add(v, templ[i], s.coefficients[i]);
        good = is_singular(VermaModule(ns2(NS2Table::Standard), {s.c, der.h, al}), v).pass;
      }
      n2ok += good;
      printed_agree += (pr.h == der.h && pr.a == der.a);
    }
  ok = ok && n2ok == n2;
  d << "ns2: " << n2ok << "/" << n2 << " grid points solved and verified; printed (h, a) agree at " << printed_agree
    << "/" << n2;
  report(3, "parameter solver", ok, d.str());
}

void ns2_relation_report() {
  std::cout << "  ns2 relations (graded table), kappa = 1/alpha, c = 3 - 3t:\n"
            << "    derived: h = -1/2 + (1 - alpha^2)/(2t),  a = (alpha^2 - 1)/(t alpha)\n"
            << "    printed: h = -1/2 + 3/(8t) - (4 alpha^2 - 1)/t,  a = (alpha - 1)^2/(t alpha)\n";
  for (Rational al : {Rational(1, 2), Rational(2), Rational(-3)}) {
    const Rational t(1, 3);
    Ns2Parameters der = ns2_derived_parameters(t, al), pr = ns2_printed_parameters(t, al);
    std::cout << "    t=1/3 alpha=" << al << ": derived (h, a) = (" << der.h << ", " << der.a << "), printed = ("
              << pr.h << ", " << pr.a << "), printed drift null: "
              << (drift_is_null(build_model_n2(pr)).pass ? "yes" : "no") << "\n";
  }
}

// 4 ---------------------------------------------------------------------------
void criterion_4() {
  std::ostringstream d;
  bool ok = true;
  for (Rational k : {Rational(2), Rational(8, 3), Rational(3), Rational(4), Rational(6)}) {
    DriftReport r = drift_is_null(build_model_virasoro(k));
    ok = ok && r.pass;
    d << "vir " << k << ": " << (r.pass ? "lambda=" + to_string(r.lambda) : "FAILED") << "; ";
  }
  for (Rational k : {Rational(2), Rational(8, 3), Rational(3)}) {
    DriftReport r = drift_is_null(build_model_n1(k));
    ok = ok && r.pass;
    d << "ns1 " << k << ": " << (r.pass ? "lambda=" + to_string(r.lambda) : "FAILED") << "; ";
  }
  for (Rational al : {Rational(1, 2), Rational(2)}) {
    DriftReport r = drift_is_null(build_model_n2(ns2_derived_parameters(Rational(1, 3), al)));
    ok = ok && r.pass;
    d << "ns2 t=1/3 alpha=" << al << ": " << (r.pass ? "lambda=" + to_string(r.lambda) : "FAILED") << "; ";
  }
  report(4, "integrated drift is null", ok, d.str());
}

// 5 ---------------------------------------------------------------------------
GR random_zeta(std::mt19937_64& rng, const SuperLayout& lay, bool odd) {
  std::uniform_int_distribution<int> coef(-3, 3);
  GR g(lay.total());
  for (Mask m = 0; m < (Mask{1} << lay.n_zeta); ++m)
    if ((std::popcount(m) & 1) == static_cast<int>(odd)) g.add_term(m << lay.n_theta, Rational(coef(rng)));
  return g;
}

void criterion_5() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(505);
  int pass1 = 0, pass2 = 0, ident = 0;
  const int half = kSuperconformalCases / 2;
  for (int i = 0; i < half; ++i) {
    auto lay = layout_n1(2);
    VectorFieldCoeffs<Rational> v;
    v.n_susy = 1;
    for (int j = -1; j >= -kSuperconformalDepth; --j) {
      v.A[j] = random_zeta(rng, lay, false);
      v.M[j] = random_zeta(rng, lay, true);
    }
    pass1 += is_superconformal_n1(exp_superconformal_n1(v, lay, kSuperconformalOrder)).pass;
    ident += commutator_identity_check(v, lay);
  }
  for (int i = 0; i < kSuperconformalCases - half; ++i) {
    auto lay = layout_n2(2);
    VectorFieldCoeffs<Rational> v;
    v.n_susy = 2;
    for (int j = -1; j >= -kSuperconformalDepth; --j) {
      v.A[j] = random_zeta(rng, lay, false);
      v.B[j] = random_zeta(rng, lay, false);
      v.Mp[j] = random_zeta(rng, lay, true);
      v.Mm[j] = random_zeta(rng, lay, true);
    }
    pass2 += is_superconformal_n2(exp_superconformal_n2(v, lay, kSuperconformalOrder)).pass;
  }
  std::ostringstream d;
  d << "N=1 " << pass1 << "/" << half << ", N=2 " << pass2 << "/" << kSuperconformalCases - half
    << ", [D,T] = hD " << ident << "/" << half << " (order " << kSuperconformalOrder << ", time " << seconds_since(t0)
    << " s)";
  report(5, "superconformality of exponentials", pass1 == half && ident == half && pass2 == kSuperconformalCases - half,
         d.str());
}

// 6 ---------------------------------------------------------------------------
void criterion_6() {
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> coef(-4, 4), lead(1, 5);
  const int n = 2;
  const GR z1 = GR::generator(n, 1), z2 = GR::generator(n, 2), one = GR::one(n);
  int ok = 0;
  for (int i = 0; i < kExpmapCases; ++i) {
    P f(n, Expansion::AtInfinity, kExpmapOrder);
    f.add(1, Rational(lead(rng)) * one + Rational(coef(rng)) * (z1 * z2));
    for (int p = 0; p >= -kExpmapOrder; --p) f.add(p, Rational(coef(rng)) * one + Rational(coef(rng)) * (z1 * z2));
    auto co = expmap_coordinates(f);
    ok += expmap_forward(co, kExpmapOrder).equal_to_order(f.truncated(kExpmapOrder));
  }
  report(6, "exp-map round trip", ok == kExpmapCases,
         std::to_string(ok) + "/" + std::to_string(kExpmapCases) + " exact to order " + std::to_string(kExpmapOrder));
}

// 7 ---------------------------------------------------------------------------
double classical_max_error(double horizon, double dt) {
  const Complex z0(0.0, 2.0);
  const int steps = static_cast<int>(std::lround(horizon / dt));
  std::vector<double> dB(steps, 0.0);
  auto path = simulate_classical(0.0, {z0}, dt, dB);
  double err = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const Complex exact = std::sqrt(z0 * z0 + Complex(4.0 * k * dt));
    err = std::max(err, std::abs(path.values[0][k] - exact));
  }
  return err;
}

double fitted_slope(double horizon, std::vector<double>& errs) {
  const double dts[3] = {1e-2, 1e-3, 1e-4};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  errs.clear();
  for (double dt : dts) {
    const double e = classical_max_error(horizon, dt);
    errs.push_back(e);
    const double x = std::log10(dt), y = std::log10(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
}

void criterion_7() {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<double> errs;
  const double slope = fitted_slope(1.0, errs);
  const double s = seconds_since(t0);
  std::ostringstream d;
  d << "T=1: slope " << slope << " (max errors " << errs[0] << ", " << errs[1] << ", " << errs[2] << "), time " << s
    << " s";
  report(7, "classical Euler convergence", std::fabs(slope - kSlopeTarget) <= kSlopeTolerance && s < kClassicalBudgetSeconds,
         d.str());
  std::vector<double> errs2;
  const double slope2 = fitted_slope(0.5, errs2);
  std::cout << "  note: z0 = 2i reaches the boundary point 0 exactly at T = 1 (z0^2 + 4T = 0), where the map has a\n"
            << "  square-root singularity; over T = 0.5 the same fit gives slope " << slope2 << "\n";
}

// 8 ---------------------------------------------------------------------------
void criterion_8() {
  auto t0 = std::chrono::steady_clock::now();
  const int steps = static_cast<int>(std::lround(kObsHorizon / kObsDt));
  bool ok = true;
  std::ostringstream d;
  for (double k : {2.0, 6.0}) {
    ObservableReport r = observable_mc(k, Complex(0.0, 2.0), kObsDt, steps, kObsTrials, 8080);
    const bool p = r.re.pass && r.im.pass;
    ok = ok && p;
    d << "kappa=" << k << ": obs0=" << r.initial.real() << ", dRe " << r.re.mean << " +- " << r.re.se << ", dIm "
      << r.im.mean << " +- " << r.im.se << ", swallowed " << r.swallowed << "; ";
  }
  d << "time " << seconds_since(t0) << " s";
  report(8, "observable constancy", ok, d.str());
}

// 9 ---------------------------------------------------------------------------
void criterion_9() {
  auto t0 = std::chrono::steady_clock::now();
  struct Run {
    std::string name;
    ModelSpec m;
    int twice_level;
  };
  std::vector<Run> runs{{"vir kappa=2 level<=3", build_model_virasoro(Rational(2)), 6},
                        {"ns1 kappa=3 level<=2", build_model_n1(Rational(3)), 4}};
  bool ok = true;
  std::ostringstream d;
  for (const Run& r : runs) {
    int passed = 0;
    for (int s = 1; s <= kMcSeeds; ++s) {
      MCConfig cfg;
      cfg.base_seed = static_cast<std::uint64_t>(s);
      cfg.dt = kMcDt;
      cfg.steps = kMcSteps;
      cfg.trials = kMcTrials;
      cfg.twice_level = r.twice_level;
      passed += mc_martingale(r.m, cfg).verdict;
    }
    ok = ok && passed >= kMcRequired;
    d << r.name << ": " << passed << "/" << kMcSeeds << " seeds pass; ";
  }
  d << "time " << seconds_since(t0) << " s";
  report(9, "Monte Carlo martingale", ok, d.str());
}

// 10 --------------------------------------------------------------------------
void criterion_10() {
  const Complex z(0.4, 1.1);
  const double dt = 1e-3;
  const int steps = 1000;
  double worst = 0.0;
  bool body_ok = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto dB = brownian_increments({seed, dt, steps, 1}, 0);
    auto p = simulate_n2_point(2.0, 1.5, z, dt, dB);
    for (int k = 0; k <= steps; ++k) {
      const double e = std::abs(p.h0[k].body() - (z - p.times[k]));
      worst = std::max(worst, e);
      // Rounding bound for k sequential subtractions.
      body_ok = body_ok && e <= (k + 1) * std::numeric_limits<double>::epsilon() * (std::abs(z) + 1.0);
    }
  }
  auto count = [](const Algebra& alg) {
    auto gens = generators_up_to(alg, 6);
    int fails = 0;
    for (const auto& x : gens)
      for (const auto& y : gens)
        for (const auto& w : gens) fails += !jacobi_violation(x, y, w, alg).empty();
    return fails;
  };
  const int fs = count(ns2(NS2Table::Standard)), fp = count(ns2(NS2Table::Printed));
  const bool used = build_model_n2(ns2_derived_parameters(Rational(1, 3), Rational(2))).alg.table == NS2Table::Standard;
  std::ostringstream d;
  d << "max |body - (z - t)| = " << worst << "; Jacobi failures: graded table " << fs << ", printed table " << fp
    << "; models use the graded table: " << (used ? "yes" : "no");
  report(10, "N=2 structure", body_ok && fs == 0 && fp > 0 && used, d.str());
}

// 11 --------------------------------------------------------------------------
void criterion_11() {
  const double dt = 1e-3;
  const int steps = 2000;
  bool ok = true;
  int compared = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
    for (double k : {2.0, 3.0, 6.0}) {
      auto dB = brownian_increments({seed, dt, steps, 2}, 0);
      auto p = simulate_n1_point(k, Complex(0.3, 1.2), dt, dB);
      auto c = simulate_classical(k, {Complex(0.3, 1.2)}, dt, component(dB, 2, 0));
      for (int i = 0; i <= steps; ++i) {
        const Complex a = p.h0[i].body(), b = c.values[0][i];
        ok = ok && std::memcmp(&a, &b, sizeof(Complex)) == 0;
        ++compared;
      }
      ok = ok && p.swallowed_at == c.swallowed_at[0];
    }
  report(11, "N=1 reduces to classical", ok, std::to_string(compared) + " states compared bitwise");
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> all{criterion_1, criterion_2, criterion_3, ns2_relation_report,
                                               criterion_4, criterion_5, criterion_6, criterion_7,
                                               criterion_8, criterion_9, criterion_10, criterion_11};
  for (const auto& f : all) {
    try {
      f();
    } catch (const std::exception& e) {
      std::cout << "unexpected error: " << e.what() << "\n";
      ++failures;
    }
  }
  std::cout << (failures ? std::to_string(failures) + " criterion/criteria failed" : std::string("all criteria passed"))
            << "\n";
  return failures ? 1 : 0;
}
