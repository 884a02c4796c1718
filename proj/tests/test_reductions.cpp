#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "roundsim/engine.hpp"
#include "roundsim/lower_bound.hpp"
#include "roundsim/reductions.hpp"
#include "verifier.hpp"

using namespace roundsim;

namespace {

InputConfiguration cfg(std::initializer_list<int> entries) {
  std::vector<std::optional<std::int64_t>> e;
  for (int x : entries) e.push_back(x < 0 ? std::nullopt : std::optional<std::int64_t>(x));
  return InputConfiguration(std::move(e));
}

std::vector<ProcessSet> subsets_up_to(int n, int t) {
  std::vector<ProcessSet> out;
  for (int mask = 1; mask < (1 << n); ++mask) {
    if (__builtin_popcount(static_cast<unsigned>(mask)) > t) continue;
    ProcessSet s;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) s.insert(ProcessId(i + 1));
    out.push_back(s);
  }
  return out;
}




// Every correct process decided the same value; returns it.
Value common_decision(const Execution& e) {
  auto d = decisions(e);
  std::optional<Value> v;
  for (auto p : e.correct()) {
    EXPECT_TRUE(d.of(p).has_value()) << to_string(p);
    if (!d.of(p)) continue;
    if (v) EXPECT_EQ(*v, *d.of(p)) << to_string(p);
    v = d.of(p);
  }
  return v.value_or(Value{});
}

MessageSet all_sent(const Execution& e) {
  MessageSet out;
  for (const auto& b : e.behaviors)
    for (const auto& f : b.fragments) {
      out.insert(out.end(), f.sent.begin(), f.sent.end());
      out.insert(out.end(), f.send_omitted.begin(), f.send_omitted.end());
    }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(InteractiveConsistency, ExhaustiveSmallCorpus) {
  const int n = 4;
  auto menu = byzantine_menu();
  int runs = 0;
  for (int t = 1; t <= 3; ++t) {
    auto alg = interactive_consistency(n, t);
    auto ctx = binary_context(n, t);
    auto prop = ic_validity(ctx);
    for (const auto& corrupted : subsets_up_to(n, t)) {
      std::vector<ProcessId> members(corrupted.begin(), corrupted.end());
      int assignments = 1;
      for (std::size_t i = 0; i < members.size(); ++i) assignments *= static_cast<int>(menu.size());
      for (int code = 0; code < assignments; ++code)
        for (int bits = 0; bits < (1 << n); ++bits)
          for (bool rushing : {false, true}) {
            AdversarySchedule s;
            s.rushing = rushing;
            RunOptions opts;
            int c = code;
            for (auto p : members) {
              auto b = menu[static_cast<std::size_t>(c % static_cast<int>(menu.size()))];
              c /= static_cast<int>(menu.size());
              s.faulty.insert(p);
              s.byzantine[p] = b->id();
              opts.byzantine[p] = b;
            }
            std::vector<std::int64_t> proposals;
            for (int i = 0; i < n; ++i) proposals.push_back((bits >> i) & 1);
            auto e = run(*alg, t, proposals, s, t + 2, opts);
            auto v = common_decision(e);
            ASSERT_EQ(v.size(), static_cast<std::size_t>(n));
            for (auto p : e.correct()) ASSERT_EQ(v[static_cast<std::size_t>(p.index - 1)], proposals[static_cast<std::size_t>(p.index - 1)]);
            ASSERT_TRUE(prop->admissible(oracle::realized(e, proposals)).contains(v));
            if (HasFailure()) return;
            ++runs;
          }
    }
  }
  EXPECT_EQ(runs, (16 + 112 + 368) * 16 * 2);
}

TEST(InteractiveConsistency, DecidesAtEndOfRoundTPlusOne) {
  for (int t = 1; t <= 3; ++t) {
    auto e = run(*interactive_consistency(4, t), t, std::vector<std::int64_t>{1, 0, 1, 1}, AdversarySchedule{}, t + 4);
    auto d = decisions(e);
    for (int p = 1; p <= 4; ++p) {
      EXPECT_EQ(d.first_round[static_cast<std::size_t>(p - 1)], t + 2);
      EXPECT_EQ(*d.of(ProcessId(p)), (Value{1, 0, 1, 1}));
    }
    EXPECT_TRUE(verify::check_execution(e, interactive_consistency(4, t).get()).ok());
  }
}

TEST(InteractiveConsistency, ChainsRoundTrip) {
  SigningAuthority authority;
  auto s1 = authority.signer_for(ProcessId(1));
  auto s2 = authority.signer_for(ProcessId(2));
  SignedChain chain{1, 1, {s1.sign(chain_content(1, 1)), s2.sign(chain_content(1, 1))}};
  auto back = decode_chains(encode_chains({chain}));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].instance, 1);
  EXPECT_EQ(back[0].value, 1);
  ASSERT_EQ(back[0].signatures.size(), 2u);
  EXPECT_TRUE(roundsim::verify(back[0].signatures[1], chain_content(1, 1)));
  EXPECT_FALSE(roundsim::verify(back[0].signatures[1], chain_content(1, 0)));
  EXPECT_THROW(byzantine_behavior("no-such"), std::invalid_argument);
}

TEST(Anchors, InteractiveConsistencyAtOneFault) {
  auto a = derive_anchors(*interactive_consistency(4, 1), *ic_validity(binary_context(4, 1)));
  EXPECT_EQ(a.c0, cfg({0, 0, 0, 0}));
  EXPECT_EQ(a.v0, (Value{0, 0, 0, 0}));
  EXPECT_EQ(a.c1_star, cfg({-1, 0, 0, 1}));
  EXPECT_EQ(a.c1, cfg({0, 0, 0, 1}));
  EXPECT_EQ(a.v1, (Value{0, 0, 0, 1}));
  EXPECT_TRUE(contains(a.c1, a.c1_star));
  EXPECT_FALSE(ic_validity(binary_context(4, 1))->admissible(a.c1_star).contains(a.v0));
}

TEST(Anchors, TrivialPropertyIsRefused) {
  EXPECT_THROW(derive_anchors(*interactive_consistency(4, 1), *any_value_validity(binary_context(4, 1))),
               ReductionError);
}

TEST(WeakFromAgreement, AddsNoMessages) {
  std::mt19937_64 rng(fixtures::kSeed);
  for (int i = 0; i < 1000; ++i) {
    int t = fixtures::uniform(rng, 1, 3);
    const int n = 4;
    auto inner = interactive_consistency(n, t);
    auto anchors = derive_anchors(*inner, *ic_validity(binary_context(n, t)));
    auto outer = weak_from_agreement(inner, anchors);
    auto bits = fixtures::random_bits(rng, n);
    std::vector<std::int64_t> mapped;
    for (int p = 0; p < n; ++p) {
      const auto& c = bits[static_cast<std::size_t>(p)] == 0 ? anchors.c0 : anchors.c1;
      mapped.push_back(*c.entries()[static_cast<std::size_t>(p)]);
    }
    oracle::Adversary adv;
    if (i % 2 == 0)
      adv = oracle::random_byzantine(rng, n, t);
    else
      adv.schedule = fixtures::random_omission_schedule(rng, n, t, t + 2, true);
    auto wrapped = run(*outer, t, bits, adv.schedule, t + 2, adv.options);
    auto plain = run(*inner, t, mapped, adv.schedule, t + 2, adv.options);
    ASSERT_EQ(all_sent(wrapped), all_sent(plain)) << "case " << i;
    ASSERT_EQ(message_complexity(wrapped), message_complexity(plain));
    auto violation = check_weak_consensus(wrapped);
    ASSERT_FALSE(violation) << "case " << i << ": " << to_string(violation->property);
    auto inner_d = decisions(plain);
    auto outer_d = decisions(wrapped);
    for (auto p : wrapped.correct()) {
      ASSERT_TRUE(outer_d.of(p));
      EXPECT_EQ(*outer_d.of(p), scalar(*inner_d.of(p) == anchors.v0 ? 0 : 1));
    }
  }
}

TEST(AgreementFromIc, DecisionsAreAdmissible) {
  std::mt19937_64 rng(fixtures::kSeed + 1);
  struct Case {
    int n, t;
    std::string name;
  };
  for (const auto& [n, t, name] : {Case{4, 1, "weak"}, Case{5, 2, "strong"}, Case{4, 3, "ic"}, Case{4, 2, "weak"}}) {
    auto prop = builtin_property(name, binary_context(n, t));
    auto alg = val_agreement_from_ic(prop);
    EXPECT_EQ(alg->id(), "agreement-via-ic(" + name + ")");
    for (int i = 0; i < 150; ++i) {
      auto adv = oracle::random_byzantine(rng, n, t);
      auto proposals = fixtures::random_bits(rng, n);
      auto e = run(*alg, t, proposals, adv.schedule, t + 3, adv.options);
      auto v = common_decision(e);
      auto c = oracle::realized(e, proposals);
      ASSERT_TRUE(prop->admissible(c).contains(v)) << name << " " << to_string(c);
      ASSERT_TRUE(common_admissible(*prop, c).contains(v)) << name << " " << to_string(c);
    }
  }
}

TEST(AgreementFromIc, RefusesPropertyWithoutContainmentCondition) {
  EXPECT_THROW(val_agreement_from_ic(strong_validity(binary_context(4, 2))), ReductionError);
}

TEST(ReferenceWeakConsensus, SolvesWeakConsensus) {
  std::mt19937_64 rng(fixtures::kSeed + 2);
  for (auto [n, t] : {std::pair{4, 1}, std::pair{5, 3}, std::pair{9, 8}}) {
    auto alg = reference_weak_consensus(n, t);
    EXPECT_EQ(alg->id(), "weak-from(agreement-via-ic(weak))");
    for (int b : {0, 1}) {
      auto e = run(*alg, t, uniform_proposals(n, b), AdversarySchedule{}, t + 3);
      EXPECT_EQ(common_decision(e), scalar(b));
    }
    for (int i = 0; i < 40; ++i) {
      auto adv = oracle::random_byzantine(rng, n, t);
      auto e = run(*alg, t, fixtures::random_bits(rng, n), adv.schedule, t + 3, adv.options);
      EXPECT_FALSE(check_weak_consensus(e));
      auto v = common_decision(e);
      EXPECT_TRUE(v == scalar(0) || v == scalar(1));
    }
  }
}
