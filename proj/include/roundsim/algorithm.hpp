#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "roundsim/signatures.hpp"
#include "roundsim/types.hpp"

namespace roundsim {

struct Outgoing {
  ProcessId to;
  Payload payload;
};

// Result of one local step: the next state and the messages for the next round.
struct Step {
  ProcState state;
  std::vector<Outgoing> sends;
};

struct ProcessContext {
  int n = 0;
  int t = 0;
  ProcessId self;
  const Signer* signer = nullptr;
};

// Deterministic round-based algorithm A(s, M^R) = (s', M^S).
class Algorithm {
 public:
  virtual ~Algorithm() = default;
  virtual std::string id() const = 0;
  virtual Step initial(std::int64_t proposal, const ProcessContext& ctx) const = 0;
  virtual Step transition(const ProcState& state, std::span<const Message> received,
                          const ProcessContext& ctx) const = 0;
};

using AlgorithmRef = std::shared_ptr<const Algorithm>;

class MalformedAlgorithmOutput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Helper for algorithm implementations.
inline ProcState make_state(const ProcessContext& ctx, int round, std::int64_t proposal,
                            std::optional<Value> decision, Bytes internal = {}) {
  return ProcState{ctx.self, round, proposal, std::move(decision), StateBlob(std::move(internal))};
}

std::vector<Outgoing> broadcast(const ProcessContext& ctx, const Payload& payload);

// Byzantine behaviour: arbitrary sends chosen with knowledge of everything the
// coalition has received.
struct ByzantineContext {
  int n = 0;
  int t = 0;
  ProcessId self;
  int round = 0;
  std::int64_t proposal = 0;
  const ProcessSet* coalition = nullptr;
  // Messages delivered to coalition members in earlier rounds, plus this
  // round's messages to the coalition when the adversary is rushing.
  std::span<const Message> observed;
  const CoalitionSigner* signer = nullptr;
};

class ByzantineBehavior {
 public:
  virtual ~ByzantineBehavior() = default;
  virtual std::string id() const = 0;
  virtual std::vector<Outgoing> act(const ByzantineContext& ctx) const = 0;
};

using ByzantineRef = std::shared_ptr<const ByzantineBehavior>;

}  // namespace roundsim
