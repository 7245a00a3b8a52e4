#include <doctest.h>

#include "ssle/errors.hpp"
#include "ssle/martingale.hpp"

using namespace ssle;

TEST_CASE("parameter maps") {
  Weights v2 = virasoro_weights(Rational(2));
  CHECK(v2.c == -2);
  CHECK(v2.h == 1);
  Weights v6 = virasoro_weights(Rational(6));
  CHECK(v6.c == 0);
  CHECK(v6.h == 0);
  Weights n3 = n1_weights(Rational(3));
  CHECK(n3.c == Rational(-1, 2));
  CHECK(n3.h == Rational(1, 4));
  CHECK_THROWS_AS(n1_weights(Rational(4)), DegenerateParameterError);
  CHECK_THROWS_AS(virasoro_weights(Rational(-1)), UsageError);

  Ns2Parameters p = ns2_derived_parameters(Rational(1, 3), Rational(2));
  CHECK(p.kappa == Rational(1, 2));
  CHECK(p.c == 2);
  CHECK(p.h == Rational(-5));
  CHECK(p.a == Rational(9, 2));
  CHECK_THROWS_AS(ns2_derived_parameters(Rational(0), Rational(2)), DegenerateParameterError);
  CHECK_THROWS_AS(ns2_derived_parameters(Rational(1), Rational(1)), DegenerateParameterError);
}

TEST_CASE("integrated drift is a multiple of the singular vector") {
  for (Rational k : {Rational(1), Rational(2), Rational(8, 3), Rational(6), Rational(8)}) {
    DriftReport r = drift_is_null(build_model_virasoro(k));
    INFO("virasoro kappa = " << k);
    CHECK(r.pass);
    CHECK(r.lambda == -2);
  }
  for (Rational k : {Rational(1), Rational(2), Rational(3), Rational(6), Rational(9, 2)}) {
    DriftReport r = drift_is_null(build_model_n1(k));
    INFO("ns1 kappa = " << k);
    CHECK(r.pass);
  }
  for (Rational t : {Rational(1, 3), Rational(-2), Rational(5, 4)})
    for (Rational al : {Rational(1, 2), Rational(2), Rational(-3)}) {
      DriftReport r = drift_is_null(build_model_n2(ns2_derived_parameters(t, al)));
      INFO("ns2 t = " << t << " alpha = " << al << ": " << r.status);
      CHECK(r.pass);
    }
}

TEST_CASE("drift check fails away from the critical weight") {
  for (Rational k : {Rational(2), Rational(6)}) {
    ModelSpec m = build_model_virasoro(k);
    m.weights.h += Rational(1, 7);
    CHECK_FALSE(drift_is_null(m).pass);
  }
  ModelSpec n1 = build_model_n1(Rational(3));
  n1.weights.h -= Rational(1, 5);
  CHECK_FALSE(drift_is_null(n1).pass);
  Ns2Parameters p = ns2_derived_parameters(Rational(1, 3), Rational(2));
  p.a += 1;
  CHECK_FALSE(drift_is_null(build_model_n2(p)).pass);
}

TEST_CASE("printed ns2 relations do not give a null drift for generic alpha") {
  DriftReport r = drift_is_null(build_model_n2(ns2_printed_parameters(Rational(1, 3), Rational(2))));
  CHECK_FALSE(r.pass);
}

TEST_CASE("group-step exponent X - 1/2 sum Y^2") {
  auto vir = group_step_drift(build_model_virasoro(Rational(5, 2)));
  REQUIRE(vir.size() == 1);
  CHECK(vir.begin()->first == Monomial{L(-2)});
  CHECK(vir.begin()->second == Grassmann<Rational>::scalar(0, Rational(-2)));
  auto n1 = group_step_drift(build_model_n1(Rational(3)));
  REQUIRE(n1.size() == 1);
  CHECK(n1.begin()->first == Monomial{L(-2)});
  CHECK(n1.begin()->second == Grassmann<Rational>::scalar(2, Rational(-2)));
}

TEST_CASE("Monte Carlo: serial and OpenMP paths agree bitwise") {
  MCConfig cfg;
  cfg.trials = 64;
  cfg.steps = 40;
  cfg.twice_level = 4;
  cfg.base_seed = 99;
  for (ModelSpec m : {build_model_virasoro(Rational(2)), build_model_n1(Rational(3)),
                      build_model_n2(ns2_derived_parameters(Rational(1, 3), Rational(1, 2)))}) {
    auto s = mc_trial_deltas_serial(m, cfg);
    cfg.threads = 4;
    auto p = mc_trial_deltas_parallel(m, cfg);
    cfg.threads = 0;
    CHECK(s == p);
  }
}

TEST_CASE("Monte Carlo: zero horizon gives zero deltas") {
  MCConfig cfg;
  cfg.trials = 8;
  cfg.steps = 0;
  cfg.twice_level = 4;
  auto d = mc_trial_deltas_serial(build_model_n1(Rational(3)), cfg);
  for (double x : d) CHECK(x == 0.0);
}

TEST_CASE("Monte Carlo: odd pairings vanish identically") {
  MCConfig cfg;
  cfg.trials = 200;
  cfg.steps = 50;
  cfg.twice_level = 4;
  MCReport r = mc_martingale(build_model_n1(Rational(3)), cfg);
  for (const auto& c : r.coefficients)
    if (c.monomial == "G-1/2" || c.monomial == "G-3/2" || c.monomial == "L-1 G-1/2") {
      CHECK(c.mean == 0.0);
      CHECK(c.pass);
    }
}

TEST_CASE("summary statistics") {
  CoefficientStat s = summarize("x", {1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK_FALSE(s.pass);
  CHECK(summarize("z", {0.0, 0.0}).pass);
}

TEST_CASE("classical observable") {
  Jet3 j{Complex(0, 2), 1.0, 0.0, 0.0};
  CHECK(std::abs(bb_observable_value(j, 1.0, -2.0) - Complex(-0.25, 0.0)) < 1e-15);
  auto o = observable_mc(6.0, Complex(0, 1), 1e-3, 10, 20, 1);
  CHECK(o.initial == Complex(0.0));
  CHECK(o.re.mean == 0.0);
}
