#pragma once

// JSON forms: a series is an array indexed by power; a factored series is
// {"alpha", "b"}; reports and eigenstate lists use the fields named below.

#include <json.hpp>

#include <vector>

#include "psse/eigensolve.hpp"
#include "psse/observables.hpp"
#include "psse/series.hpp"

namespace psse {

inline void to_json(nlohmann::json& j, const PowerSeries& s) { j = s.vector(); }

inline void from_json(const nlohmann::json& j, PowerSeries& s) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidArgument, "series must be a JSON array");
  s = PowerSeries(j.get<std::vector<double>>());
}

inline void to_json(nlohmann::json& j, const Interval& iv) { j = nlohmann::json::array({iv.a(), iv.b()}); }

inline void to_json(nlohmann::json& j, const FactoredSeries& f) {
  j = nlohmann::json{{"alpha", f.alpha()}, {"b", std::vector<double>(f.b().begin(), f.b().end())}};
}

inline void to_json(nlohmann::json& j, const ExpectationReport& r) {
  j = nlohmann::json{{"operator", r.operator_name}, {"value", r.value}, {"interval", r.interval},
                     {"degree", r.degree}};
}

inline void to_json(nlohmann::json& j, const Eigenstate& s) {
  j = nlohmann::json{{"n", s.n},
                     {"energy", s.energy},
                     {"endpoint_value", s.endpoint_value},
                     {"interval", s.interval},
                     {"parity", std::string(to_string(s.shooting))},
                     {"coefficients", s.wavefunction}};
}

inline void to_json(nlohmann::json& j, const BoundStates& b) {
  j = nlohmann::json{{"states", b.states}, {"warnings", b.warnings}, {"endpoint", b.endpoint}};
}

inline Interval interval_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::InvalidArgument, "interval must be [a, b]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline FactoredSeries factored_from_json(const nlohmann::json& j) {
  return {j.at("alpha").get<double>(), j.at("b").get<std::vector<double>>()};
}

}  // namespace psse
