#pragma once

#include <string>
#include <vector>

#include "roundsim/algorithm.hpp"
#include "roundsim/engine.hpp"
#include "roundsim/validity.hpp"

namespace roundsim {

// Authenticated interactive consistency: n parallel signed-chain broadcasts
// over t + 1 rounds. Decides a full vector; entries whose sender did not
// deliver exactly one value become `fallback`.
AlgorithmRef interactive_consistency(int n, int t, std::int64_t fallback = 0);

// Signed chain of the broadcast for `instance`.
struct SignedChain {
  int instance = 0;
  std::int64_t value = 0;
  std::vector<SignatureToken> signatures;
};

Bytes chain_content(int instance, std::int64_t value);
Payload encode_chains(const std::vector<SignedChain>& chains);
std::vector<SignedChain> decode_chains(const Payload& payload);

// Adversary behaviours against interactive_consistency. They ignore the
// process's own proposal so wrapped and unwrapped runs see identical faults.
ByzantineRef byzantine_silent();
ByzantineRef byzantine_equivocator();
ByzantineRef byzantine_withholder();
ByzantineRef byzantine_late_injector();
std::vector<ByzantineRef> byzantine_menu();
ByzantineRef byzantine_behavior(const std::string& id);

struct AnchorSet {
  InputConfiguration c0;         // a full configuration
  Value v0;                      // unanimous decision on c0
  InputConfiguration c1_star;    // some configuration with v0 not admissible
  InputConfiguration c1;         // full configuration containing c1_star
  Value v1;                      // unanimous decision on c1, differs from v0
};

class ReductionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs the agreement algorithm fault-free on the anchor configurations.
AnchorSet derive_anchors(const Algorithm& agreement, const ValidityProperty& property,
                         int horizon_cap = horizon_cap_from_env());

// Binary weak consensus on top of a non-trivial agreement algorithm: proposal
// b runs the inner algorithm on c_b, and the inner decision maps to 0 iff it
// equals v0.
AlgorithmRef weak_from_agreement(AlgorithmRef agreement, AnchorSet anchors);

// Agreement for `property` from interactive consistency: decide gamma of the
// agreed vector.
AlgorithmRef val_agreement_from_ic(PropertyRef property, GammaTable gamma);
AlgorithmRef val_agreement_from_ic(PropertyRef property);

// Weak consensus obtained by composing both reductions over
// interactive_consistency with weak validity.
AlgorithmRef reference_weak_consensus(int n, int t);

}  // namespace roundsim
