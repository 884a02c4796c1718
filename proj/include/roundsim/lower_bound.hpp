#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "roundsim/adversary.hpp"
#include "roundsim/engine.hpp"

namespace roundsim {

enum class Property { agreement, termination, weak_validity };
std::string to_string(Property p);

struct PropertyViolation {
  Property property;
  std::vector<ProcessId> offending;
};

// Termination, Agreement and (in fault-free unanimous executions) Weak
// Validity among the correct processes of `e`.
std::optional<PropertyViolation> check_weak_consensus(const Execution& e);

struct ProbeRecord {
  std::string name;
  std::size_t messages = 0;
};

struct Verdict {
  enum class Kind { violation, budget_exceeded, inconsistent };
  Kind kind = Kind::inconsistent;
  std::string algorithm;
  int n = 0;
  int t = 0;
  std::size_t budget = 0;  // t^2 / 32
  std::string stage;       // probe or construction that produced the verdict

  // violation
  std::optional<Property> property;
  std::vector<ProcessId> offending;
  std::optional<Execution> witness;

  // budget-exceeded
  std::size_t max_messages = 0;
  std::string probe;

  std::string reason;
  std::vector<ProbeRecord> probes;  // every probe evaluated, in order
};

std::string to_string(Verdict::Kind k);
nlohmann::json verdict_to_json(const Verdict& v, bool include_witness = true);

struct FalsifyOptions {
  int horizon_cap = horizon_cap_from_env();
  int jobs = 1;
};

std::size_t message_budget(int t);

struct DecisionRound {
  Execution base;  // fault-free unanimous execution
  int r_max = 0;   // first state round in which every process has decided
};

// Runs the fault-free execution where everyone proposes `bit`.
std::variant<DecisionRound, Verdict> find_decision_round(const Algorithm& candidate, int n, int t,
                                                         const FalsifyOptions& options = {}, int bit = 0);

struct Probe {
  std::string name;
  Execution execution;
  std::optional<Value> a_decision;  // common decision of group A, if any
  std::size_t messages = 0;
};

struct ProbeFamily {
  int n = 0;
  int t = 0;
  Partition partition;
  int horizon = 0;
  DecisionRound zero;           // E_0
  DecisionRound one;            // E_1
  std::vector<Probe> b_zero;    // B isolated from round k, everyone proposes 0; k = 1..R_max
  std::vector<Probe> c_zero;    // C isolated from round k, everyone proposes 0
  Probe c_one_first;            // C isolated from round 1, everyone proposes 1
  int default_bit = 1;          // A's decision when B is isolated from round 1
  std::vector<Probe> b_one;     // mirrored family, built only when default_bit == 0
  std::vector<Probe> c_one;
  std::vector<ProbeRecord> records;
};

std::variant<ProbeFamily, Verdict> probe_isolated_family(const Algorithm& candidate, int n, int t,
                                                         const FalsifyOptions& options = {});

struct MajorityOutcome {
  enum class Kind { majority_holds, violation, not_applicable };
  Kind kind = Kind::not_applicable;
  std::string reason;
  std::optional<PropertyViolation> violation;
  std::optional<Execution> witness;
  int y_agreeing = 0;
};

// X correct and unanimous, Y isolated from round k, Z the rest of the faulty
// processes. Either most of Y agrees with X or swapping the omissions of a
// lightly-omitting dissenter in Y yields a violation.
MajorityOutcome majority_check(const Execution& e, const ProcessSet& x, const ProcessSet& y, const ProcessSet& z,
                               int k);

// Most members of a group of `group_size` that can each miss at least
// `threshold` messages when the group misses fewer than `total` in all.
int max_heavy_receivers(int group_size, std::size_t total, std::size_t threshold);

struct CriticalRound {
  int round = 0;
  bool mirrored = false;  // the scan ran over the proposals-1 family
};

// Smallest R with b_R = series[0] and b_{R+1} != series[0].
int critical_round(const std::vector<int>& series);
CriticalRound critical_round(const ProbeFamily& family);

Verdict falsify(const Algorithm& candidate, int n, int t, const FalsifyOptions& options = {});

}  // namespace roundsim
