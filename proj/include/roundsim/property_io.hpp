#pragma once

#include <string>

#include <json.hpp>

#include "roundsim/validity.hpp"

namespace roundsim {

PropertyRef property_from_json(const nlohmann::json& j);
nlohmann::json property_to_json(const ValidityProperty& v);

nlohmann::json configuration_to_json(const InputConfiguration& c);
InputConfiguration configuration_from_json(const nlohmann::json& j, int n);

// "builtin:<name>" or a path to a property file.
PropertyRef load_property(const std::string& spec, int n, int t);

}  // namespace roundsim
