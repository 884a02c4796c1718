#include "roundsim/exec_model.hpp"

#include <algorithm>
#include <map>

namespace roundsim {

const Fragment& Behavior::at(int round) const {
  if (round < 1 || round > length())
    throw std::out_of_range("round " + std::to_string(round) + " outside behavior of length " +
                            std::to_string(length()));
  return fragments[static_cast<std::size_t>(round - 1)];
}

namespace {
MessageSet collect(const Behavior& b, MessageSet Fragment::*field) {
  MessageSet out;
  for (const auto& f : b.fragments) out.insert(out.end(), (f.*field).begin(), (f.*field).end());
  normalize(out);
  return out;
}
}  // namespace

MessageSet MessageSets::all_sent() const { return collect(*b_, &Fragment::sent); }
MessageSet MessageSets::all_send_omitted() const { return collect(*b_, &Fragment::send_omitted); }
MessageSet MessageSets::all_received() const { return collect(*b_, &Fragment::received); }
MessageSet MessageSets::all_receive_omitted() const { return collect(*b_, &Fragment::receive_omitted); }

const Behavior& Execution::behavior(ProcessId p) const {
  if (p.index < 1 || p.index > static_cast<int>(behaviors.size()))
    throw std::out_of_range("no behavior for " + to_string(p));
  return behaviors[static_cast<std::size_t>(p.index - 1)];
}

std::vector<ProcessId> Execution::correct() const {
  std::vector<ProcessId> out;
  for (int i = 1; i <= n; ++i)
    if (!faulty.contains(ProcessId(i))) out.emplace_back(i);
  return out;
}

std::string to_string(const Violation& v) {
  std::string s = v.condition + " at " + to_string(v.process);
  if (v.round > 0) s += " round " + std::to_string(v.round);
  if (!v.detail.empty()) s += ": " + v.detail;
  if (v.message) s += " " + to_string(*v.message);
  return s;
}

namespace {

void add(std::vector<Violation>& out, std::string condition, ProcessId p, int round, std::string detail,
         std::optional<Message> m = std::nullopt) {
  out.push_back(Violation{std::move(condition), p, round, std::move(detail), std::move(m)});
}

// Two entries of first ∪ second that share `key` and are not the very same
// message listed in both sets (that case is a disjointness failure instead).
template <typename Key>
std::optional<Message> shared_key(const MessageSet& first, const MessageSet& second, Key key) {
  std::map<ProcessId, std::vector<const Message*>> by_key;
  for (const auto* set : {&first, &second})
    for (const auto& m : *set) by_key[key(m)].push_back(&m);
  for (const auto& [k, msgs] : by_key) {
    for (std::size_t i = 0; i < msgs.size(); ++i)
      for (std::size_t j = i + 1; j < msgs.size(); ++j) {
        bool same_set = (msgs[i] >= first.data() && msgs[i] < first.data() + first.size()) ==
                        (msgs[j] >= first.data() && msgs[j] < first.data() + first.size());
        if (same_set || !(*msgs[i] == *msgs[j])) return *msgs[j];
      }
  }
  return std::nullopt;
}

}  // namespace

std::vector<Violation> validate_fragment(const Fragment& f, ProcessId owner, int round) {
  std::vector<Violation> out;
  if (f.state.process != owner)
    add(out, "fragment.1", owner, round, "state belongs to " + to_string(f.state.process));
  if (f.state.round != round)
    add(out, "fragment.2", owner, round, "state round is " + std::to_string(f.state.round));
  for (const auto* set : {&f.sent, &f.send_omitted, &f.received, &f.receive_omitted})
    for (const auto& m : *set)
      if (m.round != round) add(out, "fragment.3", owner, round, "message from another round", m);
  for (const auto& m : f.sent)
    if (contains_identity(f.send_omitted, m)) add(out, "fragment.4", owner, round, "sent and send-omitted", m);
  for (const auto& m : f.received)
    if (contains_identity(f.receive_omitted, m))
      add(out, "fragment.5", owner, round, "received and receive-omitted", m);
  for (const auto* set : {&f.sent, &f.send_omitted})
    for (const auto& m : *set)
      if (m.sender != owner) add(out, "fragment.6", owner, round, "outgoing message with foreign sender", m);
  for (const auto* set : {&f.received, &f.receive_omitted})
    for (const auto& m : *set)
      if (m.receiver != owner) add(out, "fragment.7", owner, round, "incoming message with foreign receiver", m);
  for (const auto* set : {&f.sent, &f.send_omitted, &f.received, &f.receive_omitted})
    for (const auto& m : *set)
      if (m.sender == m.receiver) add(out, "fragment.8", owner, round, "self-addressed message", m);
  if (auto m = shared_key(f.sent, f.send_omitted, [](const Message& x) { return x.receiver; }))
    add(out, "fragment.9", owner, round, "two outgoing messages to the same receiver", *m);
  if (auto m = shared_key(f.received, f.receive_omitted, [](const Message& x) { return x.sender; }))
    add(out, "fragment.10", owner, round, "two incoming messages from the same sender", *m);
  return out;
}

namespace {

MessageSet outgoing_messages(const std::vector<Outgoing>& sends, ProcessId self, int round) {
  MessageSet out;
  out.reserve(sends.size());
  for (const auto& o : sends) out.push_back(Message{self, o.to, round, o.payload});
  normalize(out);
  return out;
}

MessageSet merged(const MessageSet& a, const MessageSet& b) {
  MessageSet out = a;
  out.insert(out.end(), b.begin(), b.end());
  normalize(out);
  return out;
}

}  // namespace

std::vector<Violation> validate_behavior(const Behavior& b, const Algorithm* algorithm, ProcessId owner,
                                         int n, int t) {
  std::vector<Violation> out;
  for (int j = 1; j <= b.length(); ++j) {
    auto fv = validate_fragment(b.at(j), owner, j);
    for (auto& v : fv) {
      v.detail = v.condition + ": " + v.detail;
      v.condition = "behavior.1";
      out.push_back(std::move(v));
    }
  }
  if (b.fragments.empty()) return out;

  const auto& first = b.at(1).state;
  for (int j = 2; j <= b.length(); ++j) {
    const auto& prev = b.at(j - 1).state;
    const auto& cur = b.at(j).state;
    if (cur.proposal != first.proposal) add(out, "behavior.5", owner, j, "proposal changed");
    if (prev.decision && prev.decision != cur.decision) add(out, "behavior.6", owner, j, "decision revoked or changed");
  }
  if (!algorithm) return out;

  SigningAuthority authority;
  Signer signer = authority.signer_for(owner);
  ProcessContext ctx{n, t, owner, &signer};

  Step step;
  try {
    step = algorithm->initial(first.proposal, ctx);
  } catch (const std::exception& ex) {
    add(out, "behavior.2", owner, 1, std::string("algorithm rejected the proposal: ") + ex.what());
    return out;
  }
  if (!(step.state == first)) add(out, "behavior.2", owner, 1, "first state is not the initial state");
  if (outgoing_messages(step.sends, owner, 1) != merged(b.at(1).sent, b.at(1).send_omitted))
    add(out, first.proposal == 0 ? "behavior.3" : "behavior.4", owner, 1,
        "round-1 messages differ from the initial messages");

  // Replay from the recorded state when its bytes are known, otherwise from
  // the replayed one (digest-only traces).
  ProcState current = first.internal.has_bytes() ? first : step.state;
  for (int j = 1; j < b.length(); ++j) {
    const auto& f = b.at(j);
    try {
      step = algorithm->transition(current, f.received, ctx);
    } catch (const std::exception& ex) {
      add(out, "behavior.7", owner, j, std::string("transition failed: ") + ex.what());
      return out;
    }
    const auto& next = b.at(j + 1);
    if (!(step.state == next.state)) add(out, "behavior.7", owner, j + 1, "state does not follow from the transition");
    if (outgoing_messages(step.sends, owner, j + 1) != merged(next.sent, next.send_omitted))
      add(out, "behavior.7", owner, j + 1, "messages do not follow from the transition");
    current = next.state.internal.has_bytes() ? next.state : step.state;
  }
  return out;
}

std::vector<Violation> validate_execution(const Execution& e, const Algorithm* algorithm) {
  std::vector<Violation> out;
  if (static_cast<int>(e.faulty.size()) > e.t)
    add(out, "faulty-processes", ProcessId(), 0,
        std::to_string(e.faulty.size()) + " faulty processes exceed t = " + std::to_string(e.t));
  for (auto p : e.faulty)
    if (p.index < 1 || p.index > e.n) add(out, "faulty-processes", p, 0, "unknown process");
  for (auto p : e.byzantine)
    if (!e.faulty.contains(p)) add(out, "faulty-processes", p, 0, "Byzantine process not marked faulty");

  if (static_cast<int>(e.behaviors.size()) != e.n) {
    add(out, "composition", ProcessId(), 0, "expected " + std::to_string(e.n) + " behaviors");
    return out;
  }
  for (int i = 1; i <= e.n; ++i) {
    ProcessId p(i);
    const auto& b = e.behavior(p);
    if (b.length() != e.horizon)
      add(out, "composition", p, 0, "behavior length " + std::to_string(b.length()) + " differs from horizon");
    const Algorithm* alg = e.byzantine.contains(p) ? nullptr : algorithm;
    for (auto& v : validate_behavior(b, alg, p, e.n, e.t)) {
      v.detail = v.condition + ": " + v.detail;
      v.condition = "composition";
      out.push_back(std::move(v));
    }
  }

  auto in_range = [&](ProcessId p) { return p.index >= 1 && p.index <= e.n; };
  for (int i = 1; i <= e.n; ++i) {
    ProcessId p(i);
    const auto& b = e.behavior(p);
    for (const auto& f : b.fragments) {
      int j = f.state.round;
      for (const auto& m : f.sent) {
        if (!in_range(m.receiver) || m.round < 1 || m.round > e.behavior(m.receiver).length()) {
          add(out, "send-validity", p, j, "message to unknown receiver or round", m);
          continue;
        }
        const auto& rf = e.behavior(m.receiver).at(m.round);
        if (!contains_exact(rf.received, m) && !contains_exact(rf.receive_omitted, m))
          add(out, "send-validity", p, j, "sent message neither received nor receive-omitted", m);
      }
      for (const auto* set : {&f.received, &f.receive_omitted})
        for (const auto& m : *set) {
          if (!in_range(m.sender) || m.round < 1 || m.round > e.behavior(m.sender).length()) {
            add(out, "receive-validity", p, j, "message from unknown sender or round", m);
            continue;
          }
          if (!contains_exact(e.behavior(m.sender).at(m.round).sent, m))
            add(out, "receive-validity", p, j, "incoming message was never sent", m);
        }
      if ((!f.send_omitted.empty() || !f.receive_omitted.empty()) && !e.faulty.contains(p))
        add(out, "omission-validity", p, j, "correct process commits omissions");
    }
  }
  return out;
}

View view(const Execution& e, ProcessId p, std::optional<int> horizon) {
  const auto& b = e.behavior(p);
  int h = horizon.value_or(b.length());
  if (h > b.length()) throw HorizonMismatch("view horizon exceeds behavior length");
  View v{p, b.fragments.empty() ? 0 : b.at(1).state.proposal, {}};
  for (int j = 1; j <= h; ++j) v.received.push_back(b.at(j).received);
  return v;
}

bool indistinguishable(const Execution& e1, const Execution& e2, ProcessId p, std::optional<int> horizon) {
  if (!horizon && e1.horizon != e2.horizon)
    throw HorizonMismatch("executions have horizons " + std::to_string(e1.horizon) + " and " +
                          std::to_string(e2.horizon));
  int h = horizon.value_or(e1.horizon);
  auto v1 = view(e1, p, h);
  auto v2 = view(e2, p, h);
  return v1.proposal == v2.proposal && v1.received == v2.received;
}

}  // namespace roundsim
