#include "roundsim/engine.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <tuple>

namespace roundsim {

using nlohmann::json;

std::vector<Outgoing> broadcast(const ProcessContext& ctx, const Payload& payload) {
  std::vector<Outgoing> out;
  out.reserve(static_cast<std::size_t>(ctx.n - 1));
  for (int i = 1; i <= ctx.n; ++i)
    if (i != ctx.self.index) out.push_back(Outgoing{ProcessId(i), payload});
  return out;
}

std::vector<std::int64_t> uniform_proposals(int n, std::int64_t v) {
  return std::vector<std::int64_t>(static_cast<std::size_t>(n), v);
}

int horizon_cap_from_env() {
  if (const char* s = std::getenv("SIM_HORIZON_CAP")) {
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end != s && *end == '\0' && v > 0 && v <= 1'000'000) return static_cast<int>(v);
  }
  return 10000;
}

AdversarySchedule isolation_schedule(const ProcessSet& group, int from_round, std::string id) {
  AdversarySchedule s;
  s.id = std::move(id);
  s.faulty = group;
  s.isolate.push_back(IsolationDirective{group, from_round});
  return s;
}

AdversarySchedule schedule_from_json(const json& j) {
  try {
    AdversarySchedule s;
    s.id = j.value("id", std::string("custom"));
    for (const auto& p : j.at("faulty")) s.faulty.insert(ProcessId(p.get<int>()));
    if (j.contains("isolate"))
      for (const auto& d : j.at("isolate")) {
        IsolationDirective iso;
        for (const auto& p : d.at("group")) iso.group.insert(ProcessId(p.get<int>()));
        iso.from_round = d.at("from_round").get<int>();
        s.isolate.push_back(std::move(iso));
      }
    if (j.contains("omissions"))
      for (const auto& d : j.at("omissions")) {
        auto kind = d.at("kind").get<std::string>();
        if (kind != "send" && kind != "receive") throw ScheduleError("omission kind must be send or receive");
        s.omissions.push_back(OmissionDirective{ProcessId(d.at("from").get<int>()), ProcessId(d.at("to").get<int>()),
                                                d.at("round").get<int>(),
                                                kind == "send" ? OmissionKind::send : OmissionKind::receive});
      }
    if (j.contains("byzantine"))
      for (const auto& d : j.at("byzantine"))
        s.byzantine[ProcessId(d.at("process").get<int>())] = d.at("behavior").get<std::string>();
    s.rushing = j.value("rushing", false);
    return s;
  } catch (const json::exception& ex) {
    throw ScheduleError(std::string("malformed schedule: ") + ex.what());
  }
}

json schedule_to_json(const AdversarySchedule& s) {
  json j;
  j["id"] = s.id;
  j["faulty"] = json::array();
  for (auto p : s.faulty) j["faulty"].push_back(p.index);
  j["isolate"] = json::array();
  for (const auto& d : s.isolate) {
    json g = json::array();
    for (auto p : d.group) g.push_back(p.index);
    j["isolate"].push_back(json{{"group", g}, {"from_round", d.from_round}});
  }
  j["omissions"] = json::array();
  for (const auto& d : s.omissions)
    j["omissions"].push_back(json{{"from", d.from.index},
                                  {"to", d.to.index},
                                  {"round", d.round},
                                  {"kind", d.kind == OmissionKind::send ? "send" : "receive"}});
  j["byzantine"] = json::array();
  for (const auto& [p, b] : s.byzantine) j["byzantine"].push_back(json{{"process", p.index}, {"behavior", b}});
  j["rushing"] = s.rushing;
  return j;
}

void validate_schedule(const AdversarySchedule& s, int n, int t) {
  auto known = [&](ProcessId p) { return p.index >= 1 && p.index <= n; };
  if (static_cast<int>(s.faulty.size()) > t)
    throw ScheduleError("schedule corrupts " + std::to_string(s.faulty.size()) + " processes but t = " +
                        std::to_string(t));
  for (auto p : s.faulty)
    if (!known(p)) throw ScheduleError("faulty process " + to_string(p) + " does not exist");
  for (const auto& d : s.isolate) {
    if (d.group.empty() || static_cast<int>(d.group.size()) >= n)
      throw ScheduleError("isolated group must be a non-empty proper subset of the processes");
    if (d.from_round < 1) throw ScheduleError("isolation must start at round 1 or later");
    for (auto p : d.group)
      if (!s.faulty.contains(p)) throw ScheduleError("isolated process " + to_string(p) + " is not faulty");
  }
  for (const auto& d : s.omissions) {
    if (!known(d.from) || !known(d.to) || d.from == d.to || d.round < 1)
      throw ScheduleError("malformed omission directive");
    auto actor = d.kind == OmissionKind::send ? d.from : d.to;
    if (!s.faulty.contains(actor)) throw ScheduleError("omission by correct process " + to_string(actor));
  }
  for (const auto& [p, b] : s.byzantine)
    if (!s.faulty.contains(p)) throw ScheduleError("Byzantine process " + to_string(p) + " is not faulty");
}

namespace {

void check_sends(const std::vector<Outgoing>& sends, ProcessId self, int n) {
  std::set<ProcessId> seen;
  for (const auto& o : sends) {
    if (o.to.index < 1 || o.to.index > n)
      throw MalformedAlgorithmOutput(to_string(self) + " addressed unknown process " + to_string(o.to));
    if (o.to == self) throw MalformedAlgorithmOutput(to_string(self) + " addressed itself");
    if (!seen.insert(o.to).second)
      throw MalformedAlgorithmOutput(to_string(self) + " sent two messages to " + to_string(o.to));
  }
}

void check_state(const ProcState& next, const ProcState* prev, ProcessId self, int round, std::int64_t proposal) {
  if (next.process != self || next.round != round || next.proposal != proposal)
    throw MalformedAlgorithmOutput(to_string(self) + " produced a state with wrong process, round or proposal");
  if (prev && prev->decision && prev->decision != next.decision)
    throw MalformedAlgorithmOutput(to_string(self) + " revoked or changed its decision");
}

using Key = std::tuple<int, int, int>;

}  // namespace

Execution run(const Algorithm& algorithm, int t, std::span<const std::int64_t> proposals,
              const AdversarySchedule& schedule, int horizon, const RunOptions& options) {
  const int n = static_cast<int>(proposals.size());
  if (n < 2) throw ScheduleError("need at least two processes");
  if (t < 0 || t >= n) throw ScheduleError("need 0 <= t < n");
  if (horizon < 1) throw ScheduleError("horizon must be positive");
  validate_schedule(schedule, n, t);
  for (const auto& [p, id] : schedule.byzantine)
    if (!options.byzantine.contains(p)) throw ScheduleError("no behavior bound for Byzantine process " + to_string(p));

  std::set<Key> send_omit, receive_omit;
  for (const auto& d : schedule.omissions)
    (d.kind == OmissionKind::send ? send_omit : receive_omit).insert(Key{d.from.index, d.to.index, d.round});
  auto receive_omitted = [&](const Message& m) {
    for (const auto& iso : schedule.isolate)
      if (m.round >= iso.from_round && iso.group.contains(m.receiver) && !iso.group.contains(m.sender)) return true;
    return receive_omit.contains(Key{m.sender.index, m.receiver.index, m.round});
  };

  SigningAuthority local_authority;
  const SigningAuthority& authority = options.authority ? *options.authority : local_authority;
  ProcessSet coalition;
  for (const auto& [p, id] : schedule.byzantine) coalition.insert(p);
  CoalitionSigner coalition_signer = authority.coalition(coalition);

  Execution e;
  e.n = n;
  e.t = t;
  e.faulty = schedule.faulty;
  e.byzantine = coalition;
  e.algorithm_id = algorithm.id();
  e.schedule_id = schedule.id;
  e.tag = options.tag;
  e.behaviors.resize(static_cast<std::size_t>(n));

  std::vector<Signer> signers;
  std::vector<ProcessContext> contexts;
  signers.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) signers.push_back(authority.signer_for(ProcessId(i)));
  for (int i = 1; i <= n; ++i)
    contexts.push_back(ProcessContext{n, t, ProcessId(i), &signers[static_cast<std::size_t>(i - 1)]});

  std::vector<ProcState> states(static_cast<std::size_t>(n));
  std::vector<std::vector<Outgoing>> pending(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    auto idx = static_cast<std::size_t>(i - 1);
    ProcessId p(i);
    if (coalition.contains(p)) {
      states[idx] = ProcState{p, 1, proposals[idx], std::nullopt, StateBlob()};
      continue;
    }
    Step step = algorithm.initial(proposals[idx], contexts[idx]);
    check_state(step.state, nullptr, p, 1, proposals[idx]);
    check_sends(step.sends, p, n);
    states[idx] = std::move(step.state);
    pending[idx] = std::move(step.sends);
  }

  auto correct_decided = [&] {
    for (int i = 1; i <= n; ++i)
      if (!schedule.faulty.contains(ProcessId(i)) && !states[static_cast<std::size_t>(i - 1)].decision) return false;
    return true;
  };
  int target = horizon;
  bool target_fixed = false;
  if (options.stop_after_decided && correct_decided()) {
    target = std::min(horizon, 1 + *options.stop_after_decided);
    target_fixed = true;
  }

  std::vector<Message> observed;  // everything delivered to the coalition so far
  for (int j = 1; j <= target; ++j) {
    std::vector<Fragment> frags(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) frags[static_cast<std::size_t>(i - 1)].state = states[static_cast<std::size_t>(i - 1)];

    auto emit = [&](ProcessId from, const Outgoing& o) {
      Message m{from, o.to, j, o.payload};
      auto& sf = frags[static_cast<std::size_t>(from.index - 1)];
      if (send_omit.contains(Key{from.index, o.to.index, j})) {
        sf.send_omitted.push_back(std::move(m));
        return;
      }
      sf.sent.push_back(m);
      auto& rf = frags[static_cast<std::size_t>(o.to.index - 1)];
      if (receive_omitted(m))
        rf.receive_omitted.push_back(std::move(m));
      else
        rf.received.push_back(std::move(m));
    };

    for (int i = 1; i <= n; ++i)
      for (const auto& o : pending[static_cast<std::size_t>(i - 1)]) emit(ProcessId(i), o);

    if (!coalition.empty()) {
      std::vector<Message> view = observed;
      if (schedule.rushing)
        for (auto p : coalition) {
          const auto& rf = frags[static_cast<std::size_t>(p.index - 1)];
          view.insert(view.end(), rf.received.begin(), rf.received.end());
        }
      std::vector<std::vector<Outgoing>> byz_out;
      for (auto p : coalition) {
        auto idx = static_cast<std::size_t>(p.index - 1);
        ByzantineContext bctx{n, t, p, j, proposals[idx], &coalition, view, &coalition_signer};
        auto outs = options.byzantine.at(p)->act(bctx);
        check_sends(outs, p, n);
        byz_out.push_back(std::move(outs));
      }
      std::size_t k = 0;
      for (auto p : coalition)
        for (const auto& o : byz_out[k++]) emit(p, o);
      for (auto p : coalition) {
        const auto& rf = frags[static_cast<std::size_t>(p.index - 1)];
        observed.insert(observed.end(), rf.received.begin(), rf.received.end());
      }
    }

    for (auto& f : frags) {
      normalize(f.sent);
      normalize(f.send_omitted);
      normalize(f.received);
      normalize(f.receive_omitted);
    }

    for (int i = 1; i <= n; ++i) {
      auto idx = static_cast<std::size_t>(i - 1);
      ProcessId p(i);
      if (coalition.contains(p)) {
        states[idx].round = j + 1;
        pending[idx].clear();
        continue;
      }
      Step step = algorithm.transition(states[idx], frags[idx].received, contexts[idx]);
      check_state(step.state, &states[idx], p, j + 1, proposals[idx]);
      check_sends(step.sends, p, n);
      states[idx] = std::move(step.state);
      pending[idx] = std::move(step.sends);
    }

    for (int i = 1; i <= n; ++i)
      e.behaviors[static_cast<std::size_t>(i - 1)].fragments.push_back(std::move(frags[static_cast<std::size_t>(i - 1)]));

    if (options.stop_after_decided && !target_fixed && correct_decided()) {
      target = std::min(horizon, j + 1 + *options.stop_after_decided);
      target_fixed = true;
    }
  }
  e.horizon = target;
  return e;
}

std::size_t message_complexity(const Execution& e) {
  std::size_t total = 0;
  for (int i = 1; i <= e.n; ++i) {
    ProcessId p(i);
    if (!e.is_correct(p)) continue;
    for (const auto& f : e.behavior(p).fragments) total += f.sent.size();
  }
  return total;
}

DecisionTable decisions(const Execution& e) {
  DecisionTable d;
  for (const auto& b : e.behaviors) {
    std::optional<Value> last;
    std::optional<int> first;
    for (const auto& f : b.fragments)
      if (f.state.decision && !first) first = f.state.round;
    if (!b.fragments.empty()) last = b.fragments.back().state.decision;
    d.value.push_back(last);
    d.first_round.push_back(first);
  }
  return d;
}

}  // namespace roundsim
