// ssle: batch front end. Exit codes: 0 pass, 1 usage error, 2 mathematical or statistical failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "json_io.hpp"
#include "ssle/errors.hpp"
#include "ssle/loewner.hpp"
#include "ssle/martingale.hpp"
#include "ssle/superfield.hpp"

using namespace ssle;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;
constexpr const char* kCsvHeader = "time,trial,point-id,component-monomial,re,im,flag";

struct Common {
  std::string output;
  std::uint64_t seed = 1;
  int threads = 0;
};

/// Writes the whole payload at once (temp file + rename) so errors never leave partial files.
void emit(const std::string& path, const std::string& payload) {
  if (path.empty() || path == "-") {
    std::cout << payload;
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw UsageError("cannot open output file '" + path + "'");
    out << payload;
    if (!out) throw UsageError("failed writing '" + path + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Rational rat(const std::string& s, const char* name) {
  try {
    return parse_rational(s);
  } catch (const std::exception&) {
    throw UsageError(std::string("--") + name + ": cannot parse '" + s + "' as a rational");
  }
}

std::optional<Rational> opt_rat(const std::string& s, const char* name) {
  if (s.empty()) return std::nullopt;
  return rat(s, name);
}

Rational need(const std::optional<Rational>& v, const char* name) {
  if (!v) throw UsageError(std::string("--") + name + " is required here");
  return *v;
}

json weights_json(const Weights& w) {
  return {{"c", to_string(w.c)}, {"h", to_string(w.h)}, {"alpha", to_string(w.alpha)}};
}

// ----------------------------------------------------------------------------
// Model parameters shared by several commands.

struct ModelArgs {
  std::string model;
  std::string kappa, t, alpha, a;
  std::string relations = "derived";

  void add_to(CLI::App* sub, bool model_required = true) {
    auto* opt = sub->add_option("--model", model, "vir | ns1 | ns2");
    if (model_required) opt->required();
    sub->add_option("--kappa", kappa, "kappa as p/q (vir, ns1)");
    sub->add_option("--t", t, "ns2: central-charge parameter, c = 3 - 3t");
    sub->add_option("--alpha", alpha, "ns2: U(1) weight alpha, kappa = 1/alpha");
    sub->add_option("--relations", relations, "ns2: derived | printed parameter relations")
        ->check(CLI::IsMember({"derived", "printed"}));
  }

  ModelSpec build(json& params) const {
    ModelKind kind = parse_model(model);
    if (kind == ModelKind::Virasoro) {
      Rational k = need(opt_rat(kappa, "kappa"), "kappa");
      params = {{"kappa", to_string(k)}};
      ModelSpec m = build_model_virasoro(k);
      params["weights"] = weights_json(m.weights);
      return m;
    }
    if (kind == ModelKind::N1) {
      Rational k = need(opt_rat(kappa, "kappa"), "kappa");
      params = {{"kappa", to_string(k)}};
      ModelSpec m = build_model_n1(k);
      params["weights"] = weights_json(m.weights);
      return m;
    }
    Rational tt = need(opt_rat(t, "t"), "t"), al = need(opt_rat(alpha, "alpha"), "alpha");
    Ns2Parameters p = relations == "printed" ? ns2_printed_parameters(tt, al) : ns2_derived_parameters(tt, al);
    params = {{"t", to_string(tt)},         {"alpha", to_string(al)}, {"relations", relations},
              {"kappa", to_string(p.kappa)}, {"a", to_string(p.a)},     {"weights", weights_json({p.c, p.h, p.alpha})}};
    return build_model_n2(p);
  }
};

// ----------------------------------------------------------------------------
// check-singular

struct SingularArgs {
  std::string algebra, kappa, c, h, alpha, t, templ;
};

Algebra algebra_of(const std::string& s) {
  switch (parse_model(s)) {
    case ModelKind::Virasoro: return virasoro();
    case ModelKind::N1: return ns1();
    case ModelKind::N2: return ns2(NS2Table::Standard);
  }
  throw UsageError("unknown algebra");
}

std::vector<Monomial> template_of(const std::string& alg, const std::string& name) {
  const ModelKind k = parse_model(alg);
  if (name == "level2" && k != ModelKind::N2) return singular_template(k);
  if (name == "level1" && k == ModelKind::N2) return singular_template(k);
  std::vector<Monomial> out;
  std::stringstream ss(name);
  std::string part;
  while (std::getline(ss, part, ';')) {
    const auto b = part.find_first_not_of(' '), e = part.find_last_not_of(' ');
    if (b == std::string::npos) continue;
    out.push_back(parse_monomial(part.substr(b, e - b + 1)));
  }
  if (out.empty()) throw UsageError("--template: empty template");
  return out;
}

json run_check_singular(const SingularArgs& a, bool& ok) {
  const Algebra alg = algebra_of(a.algebra);
  const ModelKind kind = parse_model(a.algebra);
  json rep = {{"algebra", model_name(kind)}};
  auto kappa = opt_rat(a.kappa, "kappa"), c = opt_rat(a.c, "c"), h = opt_rat(a.h, "h"),
       alpha = opt_rat(a.alpha, "alpha"), t = opt_rat(a.t, "t");
  if (!a.templ.empty()) {
    // Solve for the template coefficients and the central charge at fixed h (and alpha).
    Rational hh = h ? *h : kind == ModelKind::Virasoro ? virasoro_weights(need(kappa, "kappa")).h
                                                        : n1_weights(need(kappa, "kappa")).h;
    Rational al = alpha.value_or(Rational(0));
    auto templ = template_of(a.algebra, a.templ);
    SingularSolution s = solve_singular_params(alg, templ, hh, al);
    rep["mode"] = "solve";
    rep["h"] = to_string(hh);
    rep["alpha"] = to_string(al);
    rep["status"] = s.status;
    rep["found"] = s.found;
    if (s.found) {
      VermaVector v;
      for (std::size_t i = 0; i < templ.size(); ++i) verma_add(v, templ[i], s.coefficients[i]);
      rep["c"] = to_string(s.c);
      rep["vector"] = io::verma_to_json(v);
      if (c) {
        rep["c_input"] = to_string(*c);
        rep["c_input_matches"] = (*c == s.c);
      }
    }
    ok = s.found;
    return rep;
  }
  // Check the canonical vector of the algebra at the requested parameters.
  Weights w;
  VermaVector v;
  if (kind == ModelKind::Virasoro) {
    Rational k = need(kappa, "kappa");
    w = virasoro_weights(k);
    verma_add(v, {L(-2)}, -2);
    verma_add(v, {L(-1), L(-1)}, k / 2);
  } else if (kind == ModelKind::N1) {
    if (kappa) {
      w = n1_weights(*kappa);
    } else {
      Rational hh = need(h, "h");
      if (sgn(hh) == 0) throw DegenerateParameterError("h = 0 is degenerate for the N=1 vector");
      w = {Rational(3, 2) * (1 - 16 * hh / 3), hh, Rational(0)};
    }
    if (c) w.c = *c;
    const Rational coef = -3 / (4 * w.h);
    verma_add(v, {L(-2)}, 1);
    verma_add(v, {L(-1), L(-1)}, coef);
    verma_add(v, {G(-3), G(-1)}, -coef);
  } else {
    Ns2Parameters p = ns2_derived_parameters(need(t, "t"), need(alpha, "alpha"));
    w = {p.c, p.h, p.alpha};
    // Level-1 vector in the normalisation of the integrated drift: (1 - kappa) L-1 + a J-1 + kappa G+ G-.
    verma_add(v, {L(-1)}, 1 - p.kappa);
    verma_add(v, {J(-1)}, p.a);
    verma_add(v, {Gp(-1), Gm(-1)}, p.kappa);
  }
  SingularReport r = is_singular(VermaModule(alg, w), v);
  rep["mode"] = "check";
  rep["weights"] = weights_json(w);
  rep["vector"] = io::verma_to_json(v);
  rep["pass"] = r.pass;
  rep["transcript"] = r.transcript;
  if (!r.pass) {
    if (r.witness) rep["witness"] = gen_string(*r.witness);
    rep["witness_image"] = io::verma_to_json(r.witness_image);
  }
  ok = r.pass;
  return rep;
}

// ----------------------------------------------------------------------------
// drift-check

json run_drift_check(const ModelArgs& a, bool& ok) {
  json params;
  ModelSpec m = a.build(params);
  DriftReport r = drift_is_null(m);
  json rep = {{"model", model_name(m.kind)},
              {"params", params},
              {"pass", r.pass},
              {"lambda", to_string(r.lambda)},
              {"drift", io::verma_to_json(r.drift)},
              {"singular_vector", io::verma_to_json(r.singular_vector)},
              {"status", r.status},
              {"transcript", r.transcript}};
  ok = r.pass;
  return rep;
}

// ----------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  ModelArgs model;
  std::string a_override;
  std::vector<std::string> points{"0,1"};
  double dt = 1e-3;
  int steps = 1000;
  int trials = 1;
  int every = 1;
  int extra_gens = 0;
  double eps = kSwallowEps;
  std::string format = "csv";
};

Complex parse_point(const std::string& s) {
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument("");
    std::size_t u1 = 0, u2 = 0;
    const std::string re = s.substr(0, comma), im = s.substr(comma + 1);
    Complex z(std::stod(re, &u1), std::stod(im, &u2));
    if (u1 != re.size() || u2 != im.size()) throw std::invalid_argument("");
    return z;
  } catch (const std::exception&) {
    throw UsageError("--point: expected 're,im', got '" + s + "'");
  }
}

std::string mono_name(Mask m, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i)
    if (m & (Mask{1} << i)) out += (out.empty() ? "" : " ") + names[i];
  if (m >> names.size()) {
    for (int i = static_cast<int>(names.size()); i < 64; ++i)
      if (m & (Mask{1} << i)) out += (out.empty() ? "x" : " x") + std::to_string(i + 1);
  }
  return out.empty() ? "1" : out;
}

struct Row {
  double time;
  int trial, point;
  std::string component;
  Complex value;
  bool swallowed;
};

std::string run_simulate(const SimulateArgs& a, const Common& common, const json& config) {
  if (a.dt <= 0 || a.steps < 0 || a.trials < 1 || a.every < 1 || a.extra_gens < 0 || a.extra_gens > 8)
    throw UsageError("simulate: need dt > 0, steps >= 0, trials >= 1, every >= 1, 0 <= extra-gens <= 8");
  if (a.format != "csv" && a.format != "json") throw UsageError("--format must be csv or json");
  std::vector<Complex> pts;
  for (const auto& p : a.points) pts.push_back(parse_point(p));
  for (const Complex& z : pts)
    if (z.imag() == 0.0) throw UsageError("--point: starting points need a nonzero imaginary part");
  const std::string model = a.model.model.empty() ? "classical" : a.model.model;
  const double kappa = a.model.kappa.empty() ? 0.0 : rat(a.model.kappa, "kappa").get_d();
  std::vector<Row> rows;
  auto keep = [&](std::size_t k) { return k % a.every == 0 || k == static_cast<std::size_t>(a.steps); };
  auto push_grassmann = [&](double time, int trial, int pid, const std::string& field, const GC& g,
                            const std::vector<std::string>& names, bool sw) {
    for (const auto& [m, c] : g.terms()) rows.push_back({time, trial, pid, field + ":" + mono_name(m, names), c, sw});
  };
  for (int trial = 0; trial < a.trials; ++trial) {
    if (model == "classical") {
      auto dB = brownian_increments({common.seed, a.dt, a.steps, 1}, trial);
      ClassicalPath p = simulate_classical(kappa, pts, a.dt, dB, a.eps);
      for (std::size_t pid = 0; pid < pts.size(); ++pid)
        for (std::size_t k = 0; k < p.values[pid].size(); ++k)
          if (keep(k)) {
            const bool sw = p.swallowed_at[pid] >= 0 && static_cast<int>(k) >= p.swallowed_at[pid];
            rows.push_back({static_cast<double>(k) * a.dt, trial, static_cast<int>(pid), "f", p.values[pid][k], sw});
          }
    } else if (model == "ns1") {
      if (kappa <= 0) throw UsageError("simulate ns1: --kappa > 0 is required");
      auto dB = brownian_increments({common.seed, a.dt, a.steps, 2}, trial);
      const std::vector<std::string> names{"th", "z1", "z2"};
      for (std::size_t pid = 0; pid < pts.size(); ++pid) {
        PointPathN1 p = simulate_n1_point(kappa, pts[pid], a.dt, dB, a.extra_gens, a.eps);
        for (std::size_t k = 0; k < p.h0.size(); ++k)
          if (keep(k)) {
            const bool sw = p.swallowed_at >= 0 && static_cast<int>(k) >= p.swallowed_at;
            push_grassmann(p.times[k], trial, static_cast<int>(pid), "H0", p.h0[k], names, sw);
            push_grassmann(p.times[k], trial, static_cast<int>(pid), "H1", p.h1[k], names, sw);
          }
      }
    } else if (model == "ns2") {
      double kap = kappa, aa = 0.0;
      if (!a.model.t.empty() || !a.model.alpha.empty()) {
        json ignored;
        ModelSpec m = a.model.build(ignored);
        kap = m.kappa.get_d();
        aa = m.a.get_d();
      }
      if (!a.a_override.empty()) aa = rat(a.a_override, "a").get_d();
      if (kap <= 0) throw UsageError("simulate ns2: need --kappa > 0 or (--t, --alpha) with alpha > 0");
      auto dB = brownian_increments({common.seed, a.dt, a.steps, 1}, trial);
      const std::vector<std::string> names{"tp", "tm", "z1", "z2"};
      for (std::size_t pid = 0; pid < pts.size(); ++pid) {
        PointPathN2 p = simulate_n2_point(kap, aa, pts[pid], a.dt, dB, a.extra_gens, a.eps);
        for (std::size_t k = 0; k < p.h0.size(); ++k)
          if (keep(k)) {
            const bool sw = p.swallowed_at >= 0 && static_cast<int>(k) >= p.swallowed_at;
            push_grassmann(p.times[k], trial, static_cast<int>(pid), "H0", p.h0[k], names, sw);
            push_grassmann(p.times[k], trial, static_cast<int>(pid), "H+", p.hp[k], names, sw);
            push_grassmann(p.times[k], trial, static_cast<int>(pid), "H-", p.hm[k], names, sw);
          }
      }
    } else {
      throw UsageError("simulate: --model must be classical, ns1 or ns2");
    }
  }
  if (a.format == "csv") {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const Row& r : rows)
      out += fmt(r.time) + "," + std::to_string(r.trial) + "," + std::to_string(r.point) + "," + r.component + "," +
             fmt(r.value.real()) + "," + fmt(r.value.imag()) + "," + (r.swallowed ? "swallowed" : "ok") + "\n";
    return out;
  }
  json jrows = json::array();
  for (const Row& r : rows)
    jrows.push_back({r.time, r.trial, r.point, r.component, r.value.real(), r.value.imag(),
                     r.swallowed ? "swallowed" : "ok"});
  json out = {{"schema_version", kSchemaVersion},
              {"command", "simulate"},
              {"config", config},
              {"seed", common.seed},
              {"columns", {"time", "trial", "point-id", "component-monomial", "re", "im", "flag"}},
              {"rows", jrows}};
  return out.dump(2) + "\n";
}

// ----------------------------------------------------------------------------
// martingale-mc

struct McArgs {
  ModelArgs model;
  std::string level = "2";
  double dt = 1e-3;
  int steps = -1;
  double horizon = 0.3;
  int trials = 10000;
  bool serial = false;
};

json run_martingale_mc(const McArgs& a, const Common& common, bool& ok) {
  json params;
  ModelSpec m = a.model.build(params);
  Rational lvl = rat(a.level, "level");
  Rational twice = 2 * lvl;
  twice.canonicalize();
  if (twice.get_den() != 1 || sgn(twice) < 0) throw UsageError("--level must be a non-negative multiple of 1/2");
  if (a.trials < 100) throw UsageError("--trials must be >= 100");
  if (a.dt <= 0) throw UsageError("--dt must be positive");
  MCConfig cfg;
  cfg.base_seed = common.seed;
  cfg.dt = a.dt;
  cfg.steps = a.steps >= 0 ? a.steps : static_cast<int>(std::lround(a.horizon / a.dt));
  cfg.trials = a.trials;
  cfg.twice_level = static_cast<int>(twice.get_num().get_si());
  cfg.threads = common.threads;
  MCReport r = mc_martingale(m, cfg, !a.serial);
  json coeffs = json::array();
  for (const auto& c : r.coefficients)
    coeffs.push_back({{"monomial", c.monomial}, {"mean", c.mean}, {"se", c.se}, {"pass", c.pass}});
  json rep = {{"model", model_name(m.kind)}, {"params", params},  {"level", to_string(lvl)},
              {"trials", r.trials},          {"steps", cfg.steps}, {"dt", cfg.dt},
              {"coefficients", coeffs},      {"verdict", r.verdict}};
  ok = r.verdict;
  return rep;
}

// ----------------------------------------------------------------------------
// expmap

json run_expmap(const std::string& input, const std::string& inline_series, bool& ok) {
  json j;
  try {
    if (!inline_series.empty()) {
      j = json::parse(inline_series);
    } else {
      std::ifstream in(input);
      if (!in) throw UsageError("cannot read '" + input + "'");
      j = json::parse(in);
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("series json: ") + e.what());
  }
  auto rho = io::series_from_json<ComplexRational>(j);
  auto co = expmap_coordinates(rho);
  json v = json::object();
  for (const auto& [i, c] : co.v) v[std::to_string(i)] = io::grassmann_to_json(c);
  const int order = rho.exact() ? std::max(0, -rho.min_power()) : rho.trunc();
  ok = expmap_forward(co, order).equal_to_order(rho.truncated(order));
  return {{"v0", io::grassmann_to_json(co.v0)}, {"v", v}, {"order", order}, {"round_trip", ok}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Super-SLE toolkit: singular vectors, drift checks, simulation and Monte Carlo"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI file of option values; unknown keys are rejected");
  app.allow_config_extras(CLI::config_extras_mode::error);

  Common common;
  app.add_option("--output,-o", common.output, "output file (default: stdout)");
  app.add_option("--seed", common.seed, "base seed")->envname("SSLE_SEED");
  app.add_option("--threads", common.threads, "worker cap for parallel kernels (0 = default)")
      ->check(CLI::NonNegativeNumber);

  SingularArgs sa;
  auto* cs = app.add_subcommand("check-singular", "verify or solve for a singular vector");
  cs->set_help_flag("--help", "Print this help message and exit");
  cs->add_option("--algebra", sa.algebra, "vir | ns1 | ns2")->required();
  cs->add_option("--kappa", sa.kappa);
  cs->add_option("--c", sa.c);
  cs->add_option("--h", sa.h);
  cs->add_option("--alpha", sa.alpha);
  cs->add_option("--t", sa.t);
  cs->add_option("--template", sa.templ, "level2 | level1 (ns2) | 'L-2; L-1 L-1; ...'");

  ModelArgs da;
  auto* dc = app.add_subcommand("drift-check", "exact null test of the Grassmann-integrated drift");
  da.add_to(dc);

  SimulateArgs sim;
  auto* sc = app.add_subcommand("simulate", "Euler-Maruyama traces (CSV or JSON)");
  sim.model.add_to(sc, false);
  sc->add_option("--a", sim.a_override, "ns2: explicit a (overrides the (t, alpha) map)");
  sc->add_option("--point", sim.points, "starting point 're,im' (repeatable)");
  sc->add_option("--dt", sim.dt);
  sc->add_option("--steps", sim.steps);
  sc->add_option("--trials", sim.trials);
  sc->add_option("--every", sim.every, "output stride in steps");
  sc->add_option("--extra-gens", sim.extra_gens, "unused Grassmann generators to carry along");
  sc->add_option("--eps", sim.eps, "swallowing threshold on |body H0|");
  sc->add_option("--format", sim.format, "csv | json");

  McArgs mc;
  auto* mcc = app.add_subcommand("martingale-mc", "Monte Carlo constancy of the tracked pairings");
  mc.model.add_to(mcc);
  mcc->add_option("--level", mc.level, "level cutoff (multiple of 1/2)");
  mcc->add_option("--dt", mc.dt);
  mcc->add_option("--steps", mc.steps, "overrides --horizon");
  mcc->add_option("--horizon", mc.horizon);
  mcc->add_option("--trials", mc.trials);
  mcc->add_flag("--serial", mc.serial, "use the serial reference kernel");

  std::string ex_input, ex_series;
  auto* ec = app.add_subcommand("expmap", "exponential-map coordinates of an Aut O series");
  auto* in_opt = ec->add_option("--input", ex_input, "series JSON file");
  auto* ser_opt = ec->add_option("--series", ex_series, "series JSON text");
  in_opt->excludes(ser_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  json config = json::object();
  for (const CLI::App* sub : app.get_subcommands())
    for (const CLI::Option* opt : sub->get_options())
      if (opt->count() > 0 && opt->get_name() != "--help") config[opt->get_name()] = opt->as<std::string>();
  config["seed"] = common.seed;
  config["threads"] = common.threads;
  const std::string command = app.get_subcommands().front()->get_name();

  bool ok = true;
  std::string payload;
  auto wrap = [&](json rep) {
    json out = {{"schema_version", kSchemaVersion}, {"command", command}, {"config", config}};
    out.update(rep);
    return out.dump(2) + "\n";
  };
  try {
    if (*cs) payload = wrap(run_check_singular(sa, ok));
    if (*dc) payload = wrap(run_drift_check(da, ok));
    if (*sc) payload = run_simulate(sim, common, config);
    if (*mcc) payload = wrap(run_martingale_mc(mc, common, ok));
    if (*ec) {
      if (ex_input.empty() && ex_series.empty()) throw UsageError("expmap: give --input or --series");
      payload = wrap(run_expmap(ex_input, ex_series, ok));
    }
    emit(common.output, payload);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DegenerateParameterError& e) {
    std::cerr << "degenerate parameters: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  const int code = ok ? 0 : 2;
  return code;
}
