#ifndef HEUN_IO_JSON_HPP
#define HEUN_IO_JSON_HPP

#include <string>

#include "json.hpp"

#include "heun/connection.hpp"
#include "heun/continuation.hpp"
#include "heun/frobenius.hpp"
#include "heun/params.hpp"
#include "heun/spectral.hpp"

// JSON wire formats. Complex values are two-element [re, im] arrays
// throughout. General parameters use keys {a, q, alpha, beta, gamma,
// epsilon}; delta is emitted on output and ignored on input.

namespace heun::io {

using nlohmann::json;

inline json to_json(Complex v) { return json::array({v.real(), v.imag()}); }

inline Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorKind::invalid_argument,
                "json: complex values must be [re, im] arrays");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline json to_json(const HeunParams& p) {
  return json{{"a", to_json(p.a)},         {"q", to_json(p.q)},
              {"alpha", to_json(p.alpha)}, {"beta", to_json(p.beta)},
              {"gamma", to_json(p.gamma)}, {"epsilon", to_json(p.epsilon)},
              {"delta", to_json(p.delta)}};
}

inline json to_json(const ConfluentParams& p) {
  return json{{"alpha", to_json(p.alpha)},
              {"beta", to_json(p.beta)},
              {"gamma", to_json(p.gamma)},
              {"mu", to_json(p.mu)},
              {"nu", to_json(p.nu)}};
}

inline HeunParams heun_params_from_json(const json& j) {
  for (const char* key : {"a", "q", "alpha", "beta", "gamma", "epsilon"})
    if (!j.contains(key))
      throw Error(ErrorKind::invalid_argument,
                  std::string("json: general Heun params missing key '") + key +
                      "'");
  return HeunParams(complex_from_json(j.at("a")), complex_from_json(j.at("q")),
                    complex_from_json(j.at("alpha")),
                    complex_from_json(j.at("beta")),
                    complex_from_json(j.at("gamma")),
                    complex_from_json(j.at("epsilon")));
}

inline ConfluentParams confluent_params_from_json(const json& j) {
  for (const char* key : {"alpha", "beta", "gamma", "mu", "nu"})
    if (!j.contains(key))
      throw Error(ErrorKind::invalid_argument,
                  std::string("json: confluent params missing key '") + key +
                      "'");
  return ConfluentParams(
      complex_from_json(j.at("alpha")), complex_from_json(j.at("beta")),
      complex_from_json(j.at("gamma")), complex_from_json(j.at("mu")),
      complex_from_json(j.at("nu")));
}

inline json to_json(const EvalResult& r) {
  return json{{"value", to_json(r.value)},
              {"derivative", to_json(r.derivative)},
              {"est_error", r.est_error},
              {"n_terms", r.n_terms_used}};
}

inline json to_json(const ContinuationPath& path) {
  json wps = json::array();
  for (Complex w : path.waypoints()) wps.push_back(to_json(w));
  return json{{"waypoints", wps}, {"clearance", path.clearance()}};
}

inline ContinuationPath path_from_json(const EquationParams& eq, const json& j) {
  if (!j.contains("waypoints") || !j.contains("clearance"))
    throw Error(ErrorKind::invalid_argument,
                "json: path needs 'waypoints' and 'clearance'");
  std::vector<Complex> wps;
  for (const auto& w : j.at("waypoints")) wps.push_back(complex_from_json(w));
  return ContinuationPath(eq, std::move(wps), j.at("clearance").get<double>());
}

inline json to_json(const Matrix2& m) {
  return json::array({json::array({to_json(m.a), to_json(m.b)}),
                      json::array({to_json(m.c), to_json(m.d)})});
}

inline json to_json(const ConnectionMatrix& c) {
  return json{{"from", to_string(c.from)},
              {"to", to_string(c.to)},
              {"matrix", to_json(c.matrix)},
              {"path", to_json(c.path)},
              {"est_error", c.est_error},
              {"matching_point", to_json(c.matching_point)}};
}

inline json to_json(const Mode& m) {
  return json{{"omega", to_json(m.omega)},
              {"n", m.overtone_hint},
              {"residual", m.residual},
              {"newton_steps", m.newton_steps}};
}

}  // namespace heun::io

#endif  // HEUN_IO_JSON_HPP
