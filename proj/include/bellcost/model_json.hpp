#pragma once

// JSON encoding of models, schema "bellcost-model/1":
//   {"schema": "bellcost-model/1", "label": ...,
//    "states": [{"weight": w,
//                "dist": {"type": "joint", "values": [p00, p01, p10, p11]}
//                      | {"type": "factorized", "values": [px0, py0]},
//                "responses": [A0, A1, B0, B1]}, ...]}
// Extra top-level keys (such as an "evaluation" block) are ignored on read.

#include <string>

#include "json.hpp"

#include "bellcost/errors.hpp"
#include "bellcost/model.hpp"

namespace bellcost {

inline constexpr const char* kModelSchema = "bellcost-model/1";

inline nlohmann::json to_json(const SettingDist& d) {
  if (d.is_factorized_tag()) {
    return {{"type", "factorized"}, {"values", {d.px0(), d.py0()}}};
  }
  const auto& p = d.probs();
  return {{"type", "joint"}, {"values", {p[0], p[1], p[2], p[3]}}};
}

inline nlohmann::json to_json(const Model& m) {
  nlohmann::json states = nlohmann::json::array();
  for (const auto& s : m.states()) {
    const auto& r = s.responses;
    states.push_back({{"weight", s.weight},
                      {"dist", to_json(s.settings)},
                      {"responses", {r.A(0), r.A(1), r.B(0), r.B(1)}}});
  }
  return {{"schema", kModelSchema}, {"label", m.label()}, {"states", std::move(states)}};
}

inline SettingDist setting_dist_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  const auto& v = j.at("values");
  if (type == "joint") {
    if (v.size() != 4) throw FormatError("joint dist needs 4 values");
    return SettingDist::joint({v[0].get<double>(), v[1].get<double>(), v[2].get<double>(),
                               v[3].get<double>()});
  }
  if (type == "factorized") {
    if (v.size() != 2) throw FormatError("factorized dist needs 2 values");
    return SettingDist::factorized(v[0].get<double>(), v[1].get<double>());
  }
  throw FormatError("unknown dist type '" + type + "'");
}

inline Model model_from_json(const nlohmann::json& j) {
  try {
    if (j.value("schema", std::string{}) != kModelSchema) {
      throw FormatError(std::string("expected schema ") + kModelSchema);
    }
    std::vector<HiddenState> states;
    for (const auto& s : j.at("states")) {
      const auto& r = s.at("responses");
      if (r.size() != 4) throw FormatError("responses needs 4 entries");
      states.push_back(HiddenState{
          s.at("weight").get<double>(), setting_dist_from_json(s.at("dist")),
          Responses::of(r[0].get<int>(), r[1].get<int>(), r[2].get<int>(), r[3].get<int>())});
    }
    return Model(std::move(states), j.value("label", std::string{}));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model JSON: ") + e.what());
  }
}

}  // namespace bellcost
