#pragma once

// JSON instance format:
//   {"variables": [{"id": 0, "domain": 2, "weights": ["1/3", "2/3"]}, ...],
//    "events":    [{"id": 0, "vars": [0, 1], "violating": [[0, 0]]}, ...]}
// "weights" is optional (uniform by default) and must be exact rationals
// written as strings.

#include <algorithm>
#include <string>

#include <json.hpp>

#include "prs/model.hpp"

namespace prs {

inline Instance instance_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object() || !doc.contains("variables") || !doc.contains("events"))
      throw InputError("instance JSON needs top-level \"variables\" and \"events\"");
    std::vector<VariableSpec> vars;
    for (const auto& jv : doc.at("variables")) {
      VariableSpec v;
      v.id = jv.at("id").get<VarId>();
      v.domain_size = jv.at("domain").get<std::uint32_t>();
      if (v.domain_size == 0) throw InputError("variable " + std::to_string(v.id) + ": empty domain");
      if (jv.contains("weights")) {
        for (const auto& w : jv.at("weights")) {
          if (!w.is_string())
            throw InputError("variable " + std::to_string(v.id) + ": weights must be rational strings like \"1/3\"");
          v.weights.push_back(parse_rational(w.get<std::string>()));
        }
      } else {
        v.weights.assign(v.domain_size, Rational(1, v.domain_size));
      }
      vars.push_back(std::move(v));
    }
    std::sort(vars.begin(), vars.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

    std::vector<EventSpec> events;
    for (const auto& je : doc.at("events")) {
      EventSpec e;
      e.id = je.at("id").get<EventId>();
      e.vbl = je.at("vars").get<std::vector<VarId>>();
      e.violating = je.at("violating").get<std::vector<std::vector<Value>>>();
      events.push_back(std::move(e));
    }
    std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return Instance(std::move(vars), std::move(events));
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("instance JSON: ") + ex.what());
  }
}

inline Instance parse_instance_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("instance JSON: ") + ex.what());
  }
  return instance_from_json(doc);
}

inline nlohmann::json instance_to_json(const Instance& instance) {
  nlohmann::json doc;
  doc["variables"] = nlohmann::json::array();
  for (const auto& v : instance.variables()) {
    nlohmann::json jv{{"id", v.id}, {"domain", v.domain_size}};
    jv["weights"] = nlohmann::json::array();
    for (const auto& w : v.weights) jv["weights"].push_back(to_string(w));
    doc["variables"].push_back(std::move(jv));
  }
  doc["events"] = nlohmann::json::array();
  for (const auto& e : instance.events())
    doc["events"].push_back({{"id", e.id}, {"vars", e.vbl}, {"violating", e.violating}});
  return doc;
}

}  // namespace prs
