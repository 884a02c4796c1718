#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "roundsim/exec_model.hpp"

namespace roundsim {

class TraceParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceOptions {
  // Also write the full internal state bytes, not only their digest.
  bool include_internal = false;
};

nlohmann::json execution_to_json(const Execution& e, const TraceOptions& options = {});
Execution execution_from_json(const nlohmann::json& doc);

std::string serialize_trace(const Execution& e, const TraceOptions& options = {});
Execution parse_trace(std::string_view text);

nlohmann::json message_to_json(const Message& m);
Message message_from_json(const nlohmann::json& j);
nlohmann::json value_to_json(const Value& v);
Value value_from_json(const nlohmann::json& j);

}  // namespace roundsim
