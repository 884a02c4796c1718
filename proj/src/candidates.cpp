#include "roundsim/candidates.hpp"

#include <stdexcept>

#include "roundsim/engine.hpp"

namespace roundsim {

namespace {

Payload bit_payload(std::int64_t b) { return Payload(Bytes{static_cast<std::uint8_t>(b != 0)}); }

ProcState advance(const ProcState& s, std::optional<Value> decision, Bytes internal) {
  return ProcState{s.process, s.round + 1, s.proposal, std::move(decision), StateBlob(std::move(internal))};
}

class SilentDefault final : public Algorithm {
 public:
  std::string id() const override { return "silent-default"; }
  Step initial(std::int64_t proposal, const ProcessContext& ctx) const override {
    return {make_state(ctx, 1, proposal, scalar(1)), {}};
  }
  Step transition(const ProcState& s, std::span<const Message>, const ProcessContext&) const override {
    return {advance(s, s.decision, {}), {}};
  }
};

class OwnProposal final : public Algorithm {
 public:
  std::string id() const override { return "own-proposal"; }
  Step initial(std::int64_t proposal, const ProcessContext& ctx) const override {
    return {make_state(ctx, 1, proposal, scalar(proposal)), {}};
  }
  Step transition(const ProcState& s, std::span<const Message>, const ProcessContext&) const override {
    return {advance(s, s.decision, {}), {}};
  }
};

class StarLeader final : public Algorithm {
 public:
  static constexpr ProcessId kLeader{1};

  std::string id() const override { return "star-leader"; }

  Step initial(std::int64_t proposal, const ProcessContext& ctx) const override {
    Step step{make_state(ctx, 1, proposal, std::nullopt), {}};
    if (ctx.self != kLeader) step.sends.push_back(Outgoing{kLeader, bit_payload(proposal)});
    return step;
  }

  Step transition(const ProcState& s, std::span<const Message> received, const ProcessContext& ctx) const override {
    if (s.decision) return {advance(s, s.decision, {}), {}};
    if (ctx.self == kLeader) {
      bool all_zero = s.proposal == 0 && static_cast<int>(received.size()) == ctx.n - 1;
      for (const auto& m : received)
        if (m.payload.bytes() != Bytes{0}) all_zero = false;
      std::int64_t d = all_zero ? 0 : 1;
      return {advance(s, scalar(d), {}), broadcast(ctx, bit_payload(d))};
    }
    if (s.round < 2) return {advance(s, std::nullopt, {}), {}};
    std::int64_t d = 1;
    for (const auto& m : received)
      if (m.sender == kLeader && m.payload.size() == 1) d = m.payload.bytes()[0];
    return {advance(s, scalar(d), {}), {}};
  }
};

// View entries: 0xff unknown, otherwise the proposal bit.
class FloodEcho final : public Algorithm {
 public:
  explicit FloodEcho(int rounds) : rounds_(rounds) {
    if (rounds < 1) throw std::invalid_argument("flood-echo needs at least one round");
  }

  std::string id() const override { return "flood-echo-" + std::to_string(rounds_); }

  Step initial(std::int64_t proposal, const ProcessContext& ctx) const override {
    Bytes v(static_cast<std::size_t>(ctx.n), 0xff);
    v[static_cast<std::size_t>(ctx.self.index - 1)] = proposal != 0;
    Payload p(v);
    return {make_state(ctx, 1, proposal, std::nullopt, v), broadcast(ctx, p)};
  }

  Step transition(const ProcState& s, std::span<const Message> received, const ProcessContext& ctx) const override {
    Bytes v = s.internal.bytes();
    if (s.decision) return {advance(s, s.decision, std::move(v)), {}};
    for (const auto& m : received) {
      const auto& w = m.payload.bytes();
      if (w.size() != v.size()) continue;
      for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] == 0xff && w[i] != 0xff) v[i] = w[i];
    }
    if (s.round < rounds_) {
      Payload p(v);
      return {advance(s, std::nullopt, std::move(v)), broadcast(ctx, p)};
    }
    bool complete_zero = true;
    for (auto x : v)
      if (x != 0) complete_zero = false;
    return {advance(s, scalar(complete_zero ? 0 : 1), std::move(v)), {}};
  }

 private:
  int rounds_;
};

}  // namespace

AlgorithmRef silent_default() { return std::make_shared<SilentDefault>(); }
AlgorithmRef star_leader() { return std::make_shared<StarLeader>(); }
AlgorithmRef flood_echo(int rounds) { return std::make_shared<FloodEcho>(rounds); }
AlgorithmRef own_proposal() { return std::make_shared<OwnProposal>(); }

}  // namespace roundsim
