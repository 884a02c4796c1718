#include "roundsim/property_io.hpp"

#include <fstream>

#include "roundsim/trace_io.hpp"

namespace roundsim {

using nlohmann::json;

json configuration_to_json(const InputConfiguration& c) {
  json j = json::object();
  for (auto p : c.processes()) j[std::to_string(p.index)] = *c.at(p);
  return j;
}

InputConfiguration configuration_from_json(const json& j, int n) {
  if (!j.is_object()) throw PropertyError("configuration must be an object of process -> proposal");
  std::vector<std::optional<std::int64_t>> entries(static_cast<std::size_t>(n));
  for (const auto& [key, value] : j.items()) {
    int p = 0;
    try {
      p = std::stoi(key);
    } catch (const std::exception&) {
      throw PropertyError("bad process id '" + key + "'");
    }
    if (p < 1 || p > n) throw PropertyError("process id " + key + " out of range");
    entries[static_cast<std::size_t>(p - 1)] = value.get<std::int64_t>();
  }
  return InputConfiguration(std::move(entries));
}

PropertyRef property_from_json(const json& j) {
  try {
    ValueContext ctx{j.at("n").get<int>(), j.at("t").get<int>(), j.at("V_I").get<std::vector<std::int64_t>>()};
    std::vector<Value> outputs;
    for (const auto& v : j.at("V_O")) outputs.push_back(value_from_json(v));
    ValueSet fallback;
    for (const auto& v : j.at("default")) fallback.insert(value_from_json(v));
    std::map<InputConfiguration, ValueSet> overrides;
    if (j.contains("overrides"))
      for (const auto& o : j.at("overrides")) {
        auto c = configuration_from_json(o.at("config"), ctx.n);
        ValueSet set;
        for (const auto& v : o.at("admissible")) set.insert(value_from_json(v));
        if (!overrides.emplace(std::move(c), std::move(set)).second) throw PropertyError("duplicate override");
      }
    return std::make_shared<ValidityProperty>(j.value("name", std::string("custom")), std::move(ctx), std::move(outputs),
                                              std::move(fallback), std::move(overrides));
  } catch (const json::exception& ex) {
    throw PropertyError(std::string("malformed property: ") + ex.what());
  }
}

json property_to_json(const ValidityProperty& v) {
  json j;
  j["name"] = v.name();
  j["n"] = v.context().n;
  j["t"] = v.context().t;
  j["V_I"] = v.context().inputs;
  j["V_O"] = json::array();
  for (const auto& o : v.outputs()) j["V_O"].push_back(value_to_json(o));
  j["default"] = json::array();
  for (const auto& o : v.fallback()) j["default"].push_back(value_to_json(o));
  j["overrides"] = json::array();
  for (const auto& [c, set] : v.overrides()) {
    json adm = json::array();
    for (const auto& o : set) adm.push_back(value_to_json(o));
    j["overrides"].push_back(json{{"config", configuration_to_json(c)}, {"admissible", adm}});
  }
  return j;
}

PropertyRef load_property(const std::string& spec, int n, int t) {
  constexpr std::string_view kPrefix = "builtin:";
  if (spec.rfind(kPrefix, 0) == 0) return builtin_property(spec.substr(kPrefix.size()), binary_context(n, t));
  std::ifstream in(spec);
  if (!in) throw PropertyError("cannot open property file " + spec);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    throw PropertyError(std::string("property file is not JSON: ") + ex.what());
  }
  auto p = property_from_json(j);
  if (p->context().n != n || p->context().t != t)
    throw PropertyError("property file is for n = " + std::to_string(p->context().n) + ", t = " +
                        std::to_string(p->context().t));
  return p;
}

}  // namespace roundsim
