#include "roundsim/adversary.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

namespace roundsim {

Partition Partition::canonical(int n, int t) {
  if (t < 4 || t % 4 != 0 || t >= n) throw std::invalid_argument("partition needs 4 | t and 4 <= t < n");
  Partition part;
  int a = n - t / 2;
  for (int i = 1; i <= n; ++i) {
    if (i <= a)
      part.a.emplace_back(i);
    else if (i <= a + t / 4)
      part.b.emplace_back(i);
    else
      part.c.emplace_back(i);
  }
  return part;
}

bool check_isolated(const Execution& e, const ProcessSet& group, int from_round) {
  if (group.empty() || static_cast<int>(group.size()) >= e.n || static_cast<int>(group.size()) > e.t) return false;
  for (auto p : group) {
    if (p.index < 1 || p.index > e.n || !e.faulty.contains(p)) return false;
    for (const auto& f : e.behavior(p).fragments) {
      if (!f.send_omitted.empty()) return false;
      for (const auto& m : f.received)
        if (!group.contains(m.sender) && m.round >= from_round) return false;
      for (const auto& m : f.receive_omitted)
        if (group.contains(m.sender) || m.round < from_round) return false;
    }
  }
  // Every message addressed to the group must show up on the receiving side.
  for (const auto& b : e.behaviors)
    for (const auto& f : b.fragments)
      for (const auto& m : f.sent) {
        if (!group.contains(m.receiver)) continue;
        const auto& rf = e.behavior(m.receiver).at(m.round);
        bool omitted = !group.contains(m.sender) && m.round >= from_round;
        if (!contains_exact(omitted ? rf.receive_omitted : rf.received, m)) return false;
      }
  return true;
}

bool mergeable(const Execution& left, const Execution& right) {
  if (!left.tag || !right.tag) throw UntaggedExecution("mergeable needs scenario-tagged executions");
  if (left.tag->group != IsolatedGroup::b || right.tag->group != IsolatedGroup::c)
    throw UntaggedExecution("left execution must isolate B and right execution must isolate C");
  int k1 = left.tag->from_round, k2 = right.tag->from_round;
  if (k1 == 1 && k2 == 1) return true;
  return std::abs(k1 - k2) <= 1 && left.tag->bit == right.tag->bit;
}

SwapResult swap_omission(const Execution& e, ProcessId p) {
  Execution out = e;
  MessageSet moved = MessageSets(e.behavior(p)).all_receive_omitted();
  auto& target = out.behaviors[static_cast<std::size_t>(p.index - 1)];
  for (auto& f : target.fragments) f.receive_omitted.clear();
  for (const auto& m : moved) {
    auto& f = out.behaviors[static_cast<std::size_t>(m.sender.index - 1)].fragments[static_cast<std::size_t>(m.round - 1)];
    auto it = std::lower_bound(f.sent.begin(), f.sent.end(), m);
    if (it != f.sent.end() && *it == m) {
      f.sent.erase(it);
      f.send_omitted.insert(std::upper_bound(f.send_omitted.begin(), f.send_omitted.end(), m), m);
    }
  }
  out.faulty.clear();
  for (int i = 1; i <= out.n; ++i) {
    ProcessId q(i);
    if (out.byzantine.contains(q)) {
      out.faulty.insert(q);
      continue;
    }
    for (const auto& f : out.behavior(q).fragments)
      if (!f.send_omitted.empty() || !f.receive_omitted.empty()) {
        out.faulty.insert(q);
        break;
      }
  }
  if (!moved.empty()) out.schedule_id = e.schedule_id + "+swap(" + to_string(p) + ")";
  out.tag.reset();
  bool ok = static_cast<int>(out.faulty.size()) <= out.t;
  return SwapResult{std::move(out), ok};
}

Execution merge(const Execution& left, const Execution& right, const Partition& partition,
                const Algorithm& algorithm) {
  if (left.n != right.n || left.t != right.t) throw MergeError("executions belong to different systems");
  if (!mergeable(left, right)) throw MergeError("executions are not mergeable");
  const int n = left.n;
  const int horizon = std::min(left.horizon, right.horizon);
  const std::int64_t beta = left.tag->bit, b = right.tag->bit;
  auto set_b = partition.set_b(), set_c = partition.set_c();

  Execution e;
  e.n = n;
  e.t = left.t;
  e.faulty = set_b;
  e.faulty.insert(set_c.begin(), set_c.end());
  e.horizon = horizon;
  e.algorithm_id = algorithm.id();
  e.schedule_id = "merge(" + left.schedule_id + "," + right.schedule_id + ")";
  e.behaviors.resize(static_cast<std::size_t>(n));

  SigningAuthority authority;
  std::vector<Signer> signers;
  std::vector<ProcessContext> ctx;
  signers.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) signers.push_back(authority.signer_for(ProcessId(i)));
  for (int i = 1; i <= n; ++i) ctx.push_back(ProcessContext{n, e.t, ProcessId(i), &signers[static_cast<std::size_t>(i - 1)]});

  std::vector<ProcState> states(static_cast<std::size_t>(n));
  std::vector<std::vector<Outgoing>> pending(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    auto idx = static_cast<std::size_t>(i - 1);
    Step s = algorithm.initial(set_c.contains(ProcessId(i)) ? b : beta, ctx[idx]);
    states[idx] = std::move(s.state);
    pending[idx] = std::move(s.sends);
  }

  for (int j = 1; j <= horizon; ++j) {
    std::vector<MessageSet> to(static_cast<std::size_t>(n));
    std::vector<Fragment> frags(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
      auto idx = static_cast<std::size_t>(i - 1);
      frags[idx].state = states[idx];
      for (const auto& o : pending[idx]) {
        Message m{ProcessId(i), o.to, j, o.payload};
        frags[idx].sent.push_back(m);
        to[static_cast<std::size_t>(o.to.index - 1)].push_back(std::move(m));
      }
      normalize(frags[idx].sent);
    }
    for (int i = 1; i <= n; ++i) {
      ProcessId p(i);
      auto idx = static_cast<std::size_t>(i - 1);
      auto& incoming = to[idx];
      normalize(incoming);
      auto& f = frags[idx];
      if (set_b.contains(p) || set_c.contains(p)) {
        const auto& source = set_b.contains(p) ? left : right;
        const auto& got = source.behavior(p).at(j).received;
        for (const auto& m : got)
          if (!contains_exact(incoming, m))
            throw MergeError(to_string(p) + " received " + to_string(m) + " which is not sent in the merged execution");
        f.received = got;
        for (const auto& m : incoming)
          if (!contains_exact(got, m)) f.receive_omitted.push_back(m);
      } else {
        f.received = incoming;
      }
      Step s = algorithm.transition(states[idx], f.received, ctx[idx]);
      states[idx] = std::move(s.state);
      pending[idx] = std::move(s.sends);
    }
    for (int i = 1; i <= n; ++i)
      e.behaviors[static_cast<std::size_t>(i - 1)].fragments.push_back(std::move(frags[static_cast<std::size_t>(i - 1)]));
  }
  return e;
}

}  // namespace roundsim
