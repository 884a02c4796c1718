#include <gtest/gtest.h>

#include <cstdlib>

#include "fixtures.hpp"
#include "roundsim/candidates.hpp"
#include "roundsim/engine.hpp"
#include "roundsim/reductions.hpp"
#include "verifier.hpp"

using namespace roundsim;

namespace {

// Closed forms for the fault-free message counts, computed from the
// algorithms' descriptions rather than from the engine.
std::size_t star_leader_messages(int n) { return 2 * static_cast<std::size_t>(n - 1); }
std::size_t flood_echo_messages(int n, int k) { return static_cast<std::size_t>(k) * n * (n - 1); }

class SelfSender final : public Algorithm {
 public:
  std::string id() const override { return "self-sender"; }
  Step initial(std::int64_t p, const ProcessContext& ctx) const override {
    return {make_state(ctx, 1, p, std::nullopt), {Outgoing{ctx.self, Payload()}}};
  }
  Step transition(const ProcState& s, std::span<const Message>, const ProcessContext& ctx) const override {
    return {make_state(ctx, s.round + 1, s.proposal, std::nullopt), {}};
  }
};

class Flipper final : public Algorithm {
 public:
  std::string id() const override { return "flipper"; }
  Step initial(std::int64_t p, const ProcessContext& ctx) const override { return {make_state(ctx, 1, p, scalar(0)), {}}; }
  Step transition(const ProcState& s, std::span<const Message>, const ProcessContext& ctx) const override {
    return {make_state(ctx, s.round + 1, s.proposal, scalar(1)), {}};
  }
};

}  // namespace

TEST(Engine, FaultFreeMessageCountsMatchClosedForms) {
  for (int n : {3, 9, 17, 129}) {
    auto e = run(*star_leader(), n - 1, uniform_proposals(n, 0), AdversarySchedule{}, 4);
    EXPECT_EQ(message_complexity(e), star_leader_messages(n));
  }
  for (int k : {1, 2, 3}) {
    auto e = run(*flood_echo(k), 8, uniform_proposals(9, 0), AdversarySchedule{}, k + 2);
    EXPECT_EQ(message_complexity(e), flood_echo_messages(9, k));
  }
  EXPECT_EQ(message_complexity(run(*flood_echo(1), 8, uniform_proposals(9, 1), AdversarySchedule{}, 3)), 72u);
  EXPECT_EQ(message_complexity(run(*star_leader(), 128, uniform_proposals(129, 0), AdversarySchedule{}, 4)), 256u);
}

TEST(Engine, DecisionRounds) {
  RunOptions opts;
  opts.stop_after_decided = 2;
  auto e = run(*flood_echo(2), 8, uniform_proposals(9, 0), AdversarySchedule{}, 100, opts);
  auto d = decisions(e);
  for (const auto& r : d.first_round) EXPECT_EQ(r, 3);
  EXPECT_EQ(e.horizon, 5);
  auto s = run(*silent_default(), 1, uniform_proposals(3, 0), AdversarySchedule{}, 100, opts);
  EXPECT_EQ(s.horizon, 3);
  for (const auto& r : decisions(s).first_round) EXPECT_EQ(r, 1);
  auto leader = run(*star_leader(), 8, uniform_proposals(9, 0), AdversarySchedule{}, 100, opts);
  EXPECT_EQ(decisions(leader).first_round[0], 2);
  EXPECT_EQ(decisions(leader).first_round[1], 3);
}

TEST(Engine, SendOmissionsAndIsolation) {
  AdversarySchedule s;
  s.faulty = {ProcessId(2), ProcessId(3)};
  s.omissions.push_back(OmissionDirective{ProcessId(2), ProcessId(1), 1, OmissionKind::send});
  s.isolate.push_back(IsolationDirective{{ProcessId(3)}, 2});
  auto e = run(*flood_echo(2), 2, uniform_proposals(4, 0), s, 3);
  EXPECT_EQ(e.behavior(ProcessId(2)).at(1).send_omitted.size(), 1u);
  EXPECT_EQ(e.behavior(ProcessId(1)).at(1).received.size(), 2u);
  EXPECT_EQ(e.behavior(ProcessId(3)).at(1).receive_omitted.size(), 0u);
  EXPECT_EQ(e.behavior(ProcessId(3)).at(2).receive_omitted.size(), 3u);
  EXPECT_TRUE(e.behavior(ProcessId(3)).at(2).received.empty());
  EXPECT_TRUE(validate_execution(e, flood_echo(2).get()).empty());
}

TEST(Engine, RejectsInvalidSchedules) {
  auto alg = star_leader();
  auto props = uniform_proposals(4, 0);
  AdversarySchedule s;
  s.faulty = {ProcessId(1), ProcessId(2)};
  EXPECT_THROW(run(*alg, 1, props, s, 3), ScheduleError);
  s.faulty = {ProcessId(1)};
  s.omissions.push_back(OmissionDirective{ProcessId(2), ProcessId(3), 1, OmissionKind::send});
  EXPECT_THROW(run(*alg, 1, props, s, 3), ScheduleError);
  s.omissions.clear();
  s.isolate.push_back(IsolationDirective{{ProcessId(2)}, 1});
  EXPECT_THROW(run(*alg, 1, props, s, 3), ScheduleError);
  s.isolate.clear();
  s.byzantine[ProcessId(1)] = "silent";
  EXPECT_THROW(run(*alg, 1, props, s, 3), ScheduleError);
  EXPECT_THROW(run(*alg, 1, props, AdversarySchedule{}, 0), ScheduleError);
}

TEST(Engine, RejectsMalformedAlgorithmOutput) {
  EXPECT_THROW(run(SelfSender{}, 1, uniform_proposals(3, 0), AdversarySchedule{}, 2), MalformedAlgorithmOutput);
  EXPECT_THROW(run(Flipper{}, 1, uniform_proposals(3, 0), AdversarySchedule{}, 2), MalformedAlgorithmOutput);
}

TEST(Engine, HorizonCapComesFromEnvironment) {
  ::setenv("SIM_HORIZON_CAP", "37", 1);
  EXPECT_EQ(horizon_cap_from_env(), 37);
  ::setenv("SIM_HORIZON_CAP", "junk", 1);
  EXPECT_EQ(horizon_cap_from_env(), 10000);
  ::unsetenv("SIM_HORIZON_CAP");
  EXPECT_EQ(horizon_cap_from_env(), 10000);
}

TEST(Engine, RandomSchedulesAlwaysYieldExecutions) {
  std::mt19937_64 rng(fixtures::kSeed);
  std::vector<AlgorithmRef> algs{star_leader(), flood_echo(1), flood_echo(2), flood_echo(3), silent_default(), own_proposal()};
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    int n = fixtures::uniform(rng, 2, 12);
    int t = fixtures::uniform(rng, 0, n - 1);
    int h = fixtures::uniform(rng, 1, 6);
    const auto& alg = algs[static_cast<std::size_t>(i) % algs.size()];
    auto e = run(*alg, t, fixtures::random_bits(rng, n), fixtures::random_omission_schedule(rng, n, t, h), h);
    auto own = validate_execution(e, alg.get());
    auto independent = verify::check_execution(e, alg.get());
    ASSERT_TRUE(own.empty()) << to_string(own.front());
    ASSERT_TRUE(independent.ok()) << independent.summary();
    ++checked;
  }
  EXPECT_EQ(checked, 10000);
}

TEST(Engine, ByzantineProcessesAreStructurallyValid) {
  auto alg = interactive_consistency(4, 2);
  AdversarySchedule s;
  s.faulty = {ProcessId(2), ProcessId(4)};
  s.byzantine = {{ProcessId(2), "equivocator"}, {ProcessId(4), "withholder"}};
  RunOptions opts;
  opts.byzantine = {{ProcessId(2), byzantine_equivocator()}, {ProcessId(4), byzantine_withholder()}};
  auto e = run(*alg, 2, std::vector<std::int64_t>{1, 0, 1, 0}, s, 4, opts);
  EXPECT_EQ(e.byzantine, s.faulty);
  EXPECT_TRUE(validate_execution(e, alg.get()).empty());
  EXPECT_TRUE(verify::check_execution(e, alg.get()).ok());
}

namespace {

// Records what the coalition could observe in each round.
class Observer final : public ByzantineBehavior {
 public:
  explicit Observer(std::vector<std::size_t>* seen) : seen_(seen) {}
  std::string id() const override { return "observer"; }
  std::vector<Outgoing> act(const ByzantineContext& ctx) const override {
    std::size_t same_round = 0;
    for (const auto& m : ctx.observed) same_round += m.round == ctx.round;
    seen_->push_back(same_round);
    return {};
  }

 private:
  std::vector<std::size_t>* seen_;
};

class Forger final : public ByzantineBehavior {
 public:
  std::string id() const override { return "forger"; }
  std::vector<Outgoing> act(const ByzantineContext& ctx) const override {
    ctx.signer->sign_as(ProcessId(1), Bytes{1});
    return {};
  }
};

}  // namespace

TEST(Engine, RushingAdversarySeesTheCurrentRound) {
  for (bool rushing : {false, true}) {
    std::vector<std::size_t> seen;
    AdversarySchedule s;
    s.faulty = {ProcessId(3)};
    s.byzantine = {{ProcessId(3), "observer"}};
    s.rushing = rushing;
    RunOptions opts;
    opts.byzantine = {{ProcessId(3), std::make_shared<Observer>(&seen)}};
    run(*flood_echo(2), 1, uniform_proposals(4, 0), s, 2, opts);
    ASSERT_EQ(seen.size(), 2u);
    EXPECT_EQ(seen[0], rushing ? 3u : 0u);
  }
}

TEST(Engine, CoalitionCannotSignForCorrectProcesses) {
  AdversarySchedule s;
  s.faulty = {ProcessId(2)};
  s.byzantine = {{ProcessId(2), "forger"}};
  RunOptions opts;
  opts.byzantine = {{ProcessId(2), std::make_shared<Forger>()}};
  EXPECT_THROW(run(*interactive_consistency(3, 1), 1, uniform_proposals(3, 0), s, 2, opts), ForgeryError);
}

TEST(Signatures, EveryVerifiedTokenWasIssued) {
  SigningAuthority authority(true);
  auto alg = interactive_consistency(4, 3);
  std::mt19937_64 rng(fixtures::kSeed);
  auto menu = byzantine_menu();
  for (int i = 0; i < 50; ++i) {
    AdversarySchedule s;
    RunOptions opts;
    opts.authority = &authority;
    for (int p = 1; p <= 4; ++p)
      if (fixtures::uniform(rng, 0, 2) == 0 && static_cast<int>(s.faulty.size()) < 3) {
        auto b = menu[static_cast<std::size_t>(fixtures::uniform(rng, 0, 3))];
        s.faulty.insert(ProcessId(p));
        s.byzantine[ProcessId(p)] = b->id();
        opts.byzantine[ProcessId(p)] = b;
      }
    auto e = run(*alg, 3, fixtures::random_bits(rng, 4), s, 5, opts);
    for (const auto& b : e.behaviors)
      for (const auto& f : b.fragments)
        for (const auto& m : f.received)
          for (const auto& chain : decode_chains(m.payload))
            for (const auto& token : chain.signatures)
              if (roundsim::verify(token, chain_content(chain.instance, chain.value))) EXPECT_TRUE(authority.was_issued(token));
  }
  EXPECT_FALSE(roundsim::verify(SignatureToken{ProcessId(1), 42}, Bytes{1, 2, 3}));
}
