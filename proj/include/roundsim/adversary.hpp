#pragma once

#include <stdexcept>
#include <vector>

#include "roundsim/algorithm.hpp"
#include "roundsim/exec_model.hpp"

namespace roundsim {

// A = first n - t/2 processes, B = next t/4, C = last t/4.
struct Partition {
  std::vector<ProcessId> a, b, c;

  static Partition canonical(int n, int t);
  ProcessSet set_a() const { return {a.begin(), a.end()}; }
  ProcessSet set_b() const { return {b.begin(), b.end()}; }
  ProcessSet set_c() const { return {c.begin(), c.end()}; }
};

// Every member of `group` is faulty, never send-omits, and receive-omits
// exactly the messages from outside the group in rounds >= from_round.
bool check_isolated(const Execution& e, const ProcessSet& group, int from_round);

class UntaggedExecution : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// `left` isolates B and `right` isolates C. Either both isolations start in
// round 1, or they start at most one round apart with equal proposals.
bool mergeable(const Execution& left, const Execution& right);

struct SwapResult {
  Execution execution;
  bool within_resilience = false;  // |F'| <= t
};

// Blame every message `p` receive-omitted on its sender instead.
SwapResult swap_omission(const Execution& e, ProcessId p);

class MergeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A behaves correctly on the proposal of `left`, B replays what it received
// in `left`, C replays what it received in `right` on the proposal of `right`.
Execution merge(const Execution& left, const Execution& right, const Partition& partition,
                const Algorithm& algorithm);

}  // namespace roundsim
