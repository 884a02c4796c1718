#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "roundsim/algorithm.hpp"
#include "roundsim/types.hpp"

namespace roundsim {

// One round of one process: state at the start of the round plus the four
// message sets of that round.
struct Fragment {
  ProcState state;
  MessageSet sent;
  MessageSet send_omitted;
  MessageSet received;
  MessageSet receive_omitted;

  int round() const { return state.round; }
  friend bool operator==(const Fragment&, const Fragment&) = default;
};

struct Behavior {
  std::vector<Fragment> fragments;

  int length() const { return static_cast<int>(fragments.size()); }
  const Fragment& at(int round) const;
  friend bool operator==(const Behavior&, const Behavior&) = default;
};

// Round-indexed access to the message sets of a behavior.
class MessageSets {
 public:
  explicit MessageSets(const Behavior& b) : b_(&b) {}

  const MessageSet& sent(int round) const { return b_->at(round).sent; }
  const MessageSet& send_omitted(int round) const { return b_->at(round).send_omitted; }
  const MessageSet& received(int round) const { return b_->at(round).received; }
  const MessageSet& receive_omitted(int round) const { return b_->at(round).receive_omitted; }
  const ProcState& state(int round) const { return b_->at(round).state; }

  MessageSet all_sent() const;
  MessageSet all_send_omitted() const;
  MessageSet all_received() const;
  MessageSet all_receive_omitted() const;

 private:
  const Behavior* b_;
};

enum class IsolatedGroup { none, b, c };

// Identifies a lower-bound probe: which group is isolated, from which round,
// and the common proposal.
struct ScenarioTag {
  IsolatedGroup group = IsolatedGroup::none;
  int from_round = 0;
  int bit = 0;
  friend bool operator==(const ScenarioTag&, const ScenarioTag&) = default;
};

struct Execution {
  int n = 0;
  int t = 0;
  ProcessSet faulty;
  ProcessSet byzantine;
  int horizon = 0;
  std::string algorithm_id;
  std::string schedule_id;
  std::optional<ScenarioTag> tag;
  std::vector<Behavior> behaviors;  // behaviors[i - 1] belongs to process i

  const Behavior& behavior(ProcessId p) const;
  bool is_correct(ProcessId p) const { return !faulty.contains(p); }
  std::vector<ProcessId> correct() const;
  friend bool operator==(const Execution&, const Execution&) = default;
};

struct Violation {
  std::string condition;
  ProcessId process;
  int round = 0;
  std::string detail;
  std::optional<Message> message;
};

std::string to_string(const Violation& v);

// Conditions are named "fragment.1" .. "fragment.10".
std::vector<Violation> validate_fragment(const Fragment& f, ProcessId owner, int round);

// Conditions "behavior.1" .. "behavior.7". With a null algorithm the
// algorithm-dependent conditions (2, 3, 4, 7) are skipped.
std::vector<Violation> validate_behavior(const Behavior& b, const Algorithm* algorithm, ProcessId owner,
                                         int n, int t);

// Guarantees "faulty-processes", "composition", "send-validity",
// "receive-validity", "omission-validity". Byzantine processes are checked
// structurally only.
std::vector<Violation> validate_execution(const Execution& e, const Algorithm* algorithm);

struct View {
  ProcessId process;
  std::int64_t proposal = 0;
  std::vector<MessageSet> received;  // received[j - 1] for round j
};

View view(const Execution& e, ProcessId p, std::optional<int> horizon = std::nullopt);

class HorizonMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Same proposal and same received messages (payloads included) in every
// round up to the horizon. Differing horizons throw unless one is given.
bool indistinguishable(const Execution& e1, const Execution& e2, ProcessId p,
                       std::optional<int> horizon = std::nullopt);

}  // namespace roundsim
