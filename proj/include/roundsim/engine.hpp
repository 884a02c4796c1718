#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "roundsim/algorithm.hpp"
#include "roundsim/exec_model.hpp"

namespace roundsim {

struct IsolationDirective {
  ProcessSet group;
  int from_round = 1;
};

enum class OmissionKind { send, receive };

struct OmissionDirective {
  ProcessId from;
  ProcessId to;
  int round = 1;
  OmissionKind kind = OmissionKind::send;
};

struct AdversarySchedule {
  std::string id = "fault-free";
  ProcessSet faulty;
  std::vector<IsolationDirective> isolate;
  std::vector<OmissionDirective> omissions;
  std::map<ProcessId, std::string> byzantine;  // process -> behavior id
  bool rushing = false;
};

class ScheduleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

AdversarySchedule schedule_from_json(const nlohmann::json& j);
nlohmann::json schedule_to_json(const AdversarySchedule& s);

// Schedule that isolates `group` from round `from_round` on.
AdversarySchedule isolation_schedule(const ProcessSet& group, int from_round, std::string id);

struct RunOptions {
  // Stop this many rounds after every correct process has decided; the
  // horizon passed to run() then acts as a cap.
  std::optional<int> stop_after_decided;
  std::map<ProcessId, ByzantineRef> byzantine;  // resolved behaviors for schedule.byzantine
  const SigningAuthority* authority = nullptr;  // optional shared oracle (records tokens)
  std::optional<ScenarioTag> tag;
};

void validate_schedule(const AdversarySchedule& s, int n, int t);

// Deterministic lock-step execution of `algorithm` under the schedule.
Execution run(const Algorithm& algorithm, int t, std::span<const std::int64_t> proposals,
              const AdversarySchedule& schedule, int horizon, const RunOptions& options = {});

// Messages sent by correct processes.
std::size_t message_complexity(const Execution& e);

struct DecisionTable {
  std::vector<std::optional<Value>> value;       // value[i - 1]: decision in the last state
  std::vector<std::optional<int>> first_round;  // first state round carrying it
  const std::optional<Value>& of(ProcessId p) const { return value[static_cast<std::size_t>(p.index - 1)]; }
};

DecisionTable decisions(const Execution& e);

// Round-bound from the environment (SIM_HORIZON_CAP, default 10000).
int horizon_cap_from_env();

std::vector<std::int64_t> uniform_proposals(int n, std::int64_t v);

}  // namespace roundsim
