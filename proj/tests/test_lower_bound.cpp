#include <gtest/gtest.h>

#include "roundsim/candidates.hpp"
#include "roundsim/lower_bound.hpp"
#include "verifier.hpp"

using namespace roundsim;

namespace {

class DecideZero final : public Algorithm {
 public:
  std::string id() const override { return "decide-zero"; }
  Step initial(std::int64_t p, const ProcessContext& ctx) const override { return {make_state(ctx, 1, p, scalar(0)), {}}; }
  Step transition(const ProcState& s, std::span<const Message>, const ProcessContext& ctx) const override {
    return {make_state(ctx, s.round + 1, s.proposal, s.decision), {}};
  }
};

class NeverDecides final : public Algorithm {
 public:
  std::string id() const override { return "never"; }
  Step initial(std::int64_t p, const ProcessContext& ctx) const override { return {make_state(ctx, 1, p, std::nullopt), {}}; }
  Step transition(const ProcState& s, std::span<const Message>, const ProcessContext& ctx) const override {
    return {make_state(ctx, s.round + 1, s.proposal, std::nullopt), {}};
  }
};

FalsifyOptions small_cap() {
  FalsifyOptions o;
  o.horizon_cap = 50;
  return o;
}

void expect_sound(const Verdict& v, const Algorithm& alg) {
  ASSERT_EQ(v.kind, Verdict::Kind::violation);
  ASSERT_TRUE(v.witness);
  auto report = verify::check_execution(*v.witness, &alg);
  EXPECT_TRUE(report.ok()) << report.summary();
  EXPECT_TRUE(verify::confirms_violation(*v.witness, *v.property, v.offending));
}

}  // namespace

TEST(DecisionRound, KnownCandidates) {
  auto r = find_decision_round(*flood_echo(2), 129, 128);
  ASSERT_TRUE(std::holds_alternative<DecisionRound>(r));
  EXPECT_EQ(std::get<DecisionRound>(r).r_max, 3);
  auto leader = find_decision_round(*star_leader(), 129, 128);
  EXPECT_EQ(std::get<DecisionRound>(leader).r_max, 3);
  auto zero = find_decision_round(DecideZero{}, 17, 8);
  EXPECT_EQ(std::get<DecisionRound>(zero).r_max, 1);
}

TEST(DecisionRound, SilentDefaultViolatesWeakValidity) {
  auto r = find_decision_round(*silent_default(), 129, 128);
  ASSERT_TRUE(std::holds_alternative<Verdict>(r));
  const auto& v = std::get<Verdict>(r);
  EXPECT_EQ(v.property, Property::weak_validity);
  EXPECT_EQ(v.stage, "E0");
  EXPECT_EQ(v.offending.size(), 129u);
}

TEST(DecisionRound, ExhaustedHorizonIsATerminationViolation) {
  auto r = find_decision_round(NeverDecides{}, 17, 8, small_cap());
  ASSERT_TRUE(std::holds_alternative<Verdict>(r));
  EXPECT_EQ(std::get<Verdict>(r).property, Property::termination);
  EXPECT_EQ(std::get<Verdict>(r).witness->horizon, 50);
}

TEST(DecisionRound, RejectsBadParameters) {
  EXPECT_THROW(find_decision_round(*star_leader(), 129, 12), std::invalid_argument);
  EXPECT_THROW(find_decision_round(*star_leader(), 16, 16), std::invalid_argument);
  EXPECT_THROW(falsify(*star_leader(), 10, 4), std::invalid_argument);
}

TEST(CriticalRound, FirstSwitchOfTheSeries) {
  EXPECT_EQ(critical_round(std::vector<int>{1, 1, 1, 0}), 3);
  EXPECT_EQ(critical_round(std::vector<int>{1, 0}), 1);
  EXPECT_EQ(critical_round(std::vector<int>{0, 0, 1}), 2);
  EXPECT_THROW(critical_round(std::vector<int>{1, 1, 1}), std::logic_error);
}

TEST(Family, StarLeaderDefaultsToZeroAndMirrors) {
  auto fam_or = probe_isolated_family(*star_leader(), 129, 128);
  ASSERT_TRUE(std::holds_alternative<ProbeFamily>(fam_or));
  const auto& fam = std::get<ProbeFamily>(fam_or);
  EXPECT_EQ(fam.default_bit, 0);
  EXPECT_EQ(fam.b_zero.size(), 3u);
  EXPECT_EQ(fam.c_one.size(), 3u);
  for (const auto& p : fam.records) EXPECT_LT(p.messages, message_budget(128));
}

TEST(Majority, StarLeaderProbeYieldsSwapWitness) {
  auto fam = std::get<ProbeFamily>(probe_isolated_family(*star_leader(), 129, 128));
  const auto& p = fam.b_zero.front();
  auto x = fam.partition.set_a();
  auto c = fam.partition.set_c();
  x.insert(c.begin(), c.end());
  auto m = majority_check(p.execution, x, fam.partition.set_b(), {}, 1);
  ASSERT_EQ(m.kind, MajorityOutcome::Kind::violation);
  EXPECT_EQ(m.y_agreeing, 0);
  EXPECT_EQ(m.violation->property, Property::agreement);
  EXPECT_EQ(m.violation->offending, (std::vector<ProcessId>{ProcessId(2), ProcessId(66)}));
  EXPECT_LT(static_cast<int>(m.witness->faulty.size()), 128 / 2 + 128 / 4 + 128 / 4 - 1);
  EXPECT_TRUE(verify::check_execution(*m.witness, star_leader().get()).ok());
}

TEST(Majority, HoldsWhenIsolatedGroupAgrees) {
  auto fam = std::get<ProbeFamily>(probe_isolated_family(*own_proposal(), 17, 16));
  auto x = fam.partition.set_a();
  auto c = fam.partition.set_c();
  x.insert(c.begin(), c.end());
  auto m = majority_check(fam.b_zero.front().execution, x, fam.partition.set_b(), {}, 1);
  EXPECT_EQ(m.kind, MajorityOutcome::Kind::majority_holds);
  EXPECT_EQ(m.y_agreeing, 4);
  auto bad_shape = majority_check(fam.b_zero.front().execution, fam.partition.set_b(), fam.partition.set_a(), c, 1);
  EXPECT_EQ(bad_shape.kind, MajorityOutcome::Kind::not_applicable);
}

TEST(Majority, PigeonholeBoundMatchesExhaustiveCount) {
  for (int t : {8, 16, 24}) {
    int group = t / 4;
    std::size_t budget = message_budget(t);
    std::size_t threshold = static_cast<std::size_t>(t / 2);
    // Enumerate every distribution of fewer than `budget` omitted messages.
    int worst = 0;
    std::vector<std::size_t> counts(static_cast<std::size_t>(group), 0);
    auto rec = [&](auto&& self, int i, std::size_t left) -> void {
      if (i == group) {
        int heavy = 0;
        for (auto c : counts) heavy += c >= threshold;
        worst = std::max(worst, heavy);
        return;
      }
      for (std::size_t c = 0; c <= left; ++c) {
        counts[static_cast<std::size_t>(i)] = c;
        self(self, i + 1, left - c);
      }
    };
    rec(rec, 0, budget - 1);
    EXPECT_EQ(max_heavy_receivers(group, budget, threshold), worst) << "t = " << t;
    EXPECT_LT(worst, (group + 1) / 2);
  }
}

TEST(Falsify, Outcomes) {
  auto leader = star_leader();
  auto v = falsify(*leader, 129, 128);
  EXPECT_EQ(v.stage, "majority check on E0^B(1) (Y = B)");
  expect_sound(v, *leader);

  auto silent = silent_default();
  auto s = falsify(*silent, 129, 128);
  EXPECT_EQ(s.property, Property::weak_validity);
  expect_sound(s, *silent);

  auto flood = falsify(*flood_echo(2), 129, 128);
  EXPECT_EQ(flood.kind, Verdict::Kind::budget_exceeded);
  EXPECT_EQ(flood.probe, "E0");
  EXPECT_EQ(flood.max_messages, 2u * 129 * 128);
}

TEST(Falsify, MergePathCatchesSilentOwnProposal) {
  auto alg = own_proposal();
  auto v = falsify(*alg, 17, 16);
  expect_sound(v, *alg);
  EXPECT_EQ(v.stage, "majority check on merge(E0^B(1),E1^C(1)) (Y = C)");
  EXPECT_TRUE(v.witness->faulty.empty());
}

TEST(Falsify, BudgetVerdictNamesFirstOverBudgetProbe) {
  auto v = falsify(*flood_echo(1), 129, 128);
  ASSERT_EQ(v.kind, Verdict::Kind::budget_exceeded);
  ASSERT_FALSE(v.probes.empty());
  for (std::size_t i = 0; i + 1 < v.probes.size(); ++i) EXPECT_LT(v.probes[i].messages, v.budget);
  EXPECT_EQ(v.probes.back().name, v.probe);
  EXPECT_GE(v.probes.back().messages, v.budget);
}

TEST(Falsify, ParallelProbesGiveTheSameVerdict) {
  FalsifyOptions serial, parallel;
  parallel.jobs = 4;
  auto a = verdict_to_json(falsify(*star_leader(), 129, 128, serial));
  auto b = verdict_to_json(falsify(*star_leader(), 129, 128, parallel));
  EXPECT_EQ(a.dump(), b.dump());
}
