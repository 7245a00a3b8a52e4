#pragma once

// JSON forms used by the command line front end.
//   Grassmann:   {"terms": [{"monomial": [1, 2], "re": "p/q", "im": "r/s"}, ...]}
//   PowerSeries: {"expansion": "inf" | "0", "trunc": K, "n_gens": N, "components": {"<power>": Grassmann}}
// A missing "trunc" (or null) means an exact series.

#include <json.hpp>

#include <string>

#include "ssle/errors.hpp"
#include "ssle/grassmann.hpp"
#include "ssle/scalar.hpp"
#include "ssle/series.hpp"
#include "ssle/superalgebra.hpp"

namespace ssle::io {

using nlohmann::json;

template <class S>
json grassmann_to_json(const Grassmann<S>& g) {
  using Traits = ScalarTraits<S>;
  json terms = json::array();
  for (const auto& [mask, c] : g.terms()) {
    json mono = json::array();
    for (int i = 0; i < g.num_generators(); ++i)
      if (mask & (Mask{1} << i)) mono.push_back(i + 1);
    terms.push_back({{"monomial", mono}, {"re", Traits::re_string(c)}, {"im", Traits::im_string(c)}});
  }
  return {{"terms", terms}};
}

inline Rational rational_field(const json& j, const char* key) {
  if (!j.contains(key)) return Rational(0);
  const json& v = j.at(key);
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  throw UsageError(std::string("grassmann json: '") + key + "' must be a \"p/q\" string or an integer");
}

template <class S>
Grassmann<S> grassmann_from_json(const json& j, int n_gens) {
  using Traits = ScalarTraits<S>;
  if (!j.is_object() || !j.contains("terms") || !j.at("terms").is_array())
    throw UsageError("grassmann json: expected {\"terms\": [...]}");
  Grassmann<S> g(n_gens);
  for (const json& t : j.at("terms")) {
    if (!t.is_object() || !t.contains("monomial")) throw UsageError("grassmann json: term without monomial");
    for (const auto& [key, value] : t.items())
      if (key != "monomial" && key != "re" && key != "im") throw UsageError("grassmann json: unknown key '" + key + "'");
    Mask mask = 0;
    int last = 0;
    for (const json& idx : t.at("monomial")) {
      const int i = idx.get<int>();
      if (i <= last || i > n_gens) throw UsageError("grassmann json: monomial indices must increase within 1..n_gens");
      mask |= Mask{1} << (i - 1);
      last = i;
    }
    g.add_term(mask, Traits::from_parts(rational_field(t, "re"), rational_field(t, "im")));
  }
  return g;
}

template <class S>
json series_to_json(const PowerSeries<S>& f) {
  json comps = json::object();
  for (const auto& [p, c] : f.coeffs()) comps[std::to_string(p)] = grassmann_to_json(c);
  json out = {{"expansion", f.expansion() == Expansion::AtInfinity ? "inf" : "0"},
              {"n_gens", f.num_generators()},
              {"components", comps}};
  out["trunc"] = f.exact() ? json(nullptr) : json(f.trunc());
  return out;
}

template <class S>
PowerSeries<S> series_from_json(const json& j) {
  if (!j.is_object()) throw UsageError("series json: expected an object");
  for (const auto& [key, value] : j.items())
    if (key != "expansion" && key != "trunc" && key != "n_gens" && key != "components")
      throw UsageError("series json: unknown key '" + key + "'");
  if (!j.contains("expansion") || !j.contains("components")) throw UsageError("series json: needs expansion and components");
  const std::string e = j.at("expansion").get<std::string>();
  if (e != "inf" && e != "0") throw UsageError("series json: expansion must be \"inf\" or \"0\"");
  const int n = j.value("n_gens", 0);
  if (n < 0 || n > 16) throw UsageError("series json: n_gens out of range");
  const Expansion ex = e == "inf" ? Expansion::AtInfinity : Expansion::AtZero;
  PowerSeries<S> f = (j.contains("trunc") && !j.at("trunc").is_null())
                         ? PowerSeries<S>(n, ex, j.at("trunc").get<int>())
                         : PowerSeries<S>(n, ex);
  for (const auto& [key, value] : j.at("components").items()) {
    std::size_t used = 0;
    int p = 0;
    try {
      p = std::stoi(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size()) throw UsageError("series json: component key '" + key + "' is not an integer power");
    f.add(p, grassmann_from_json<S>(value, n));
  }
  return f;
}

inline json verma_to_json(const VermaVector& v) {
  json out = json::object();
  for (const auto& [mono, c] : v) out[monomial_string(mono)] = to_string(c);
  return out;
}

}  // namespace ssle::io
