#include <algorithm>
#include <set>
#include <stdexcept>

#include "roundsim/reductions.hpp"

namespace roundsim {

Bytes chain_content(int instance, std::int64_t value) {
  ByteWriter w;
  w.varint(0x1c).varint(static_cast<std::uint64_t>(instance)).svarint(value);
  return w.take();
}

Payload encode_chains(const std::vector<SignedChain>& chains) {
  ByteWriter w;
  w.varint(chains.size());
  for (const auto& c : chains) {
    w.varint(static_cast<std::uint64_t>(c.instance)).svarint(c.value).varint(c.signatures.size());
    for (const auto& s : c.signatures) w.varint(static_cast<std::uint64_t>(s.signer.index)).u64(s.digest);
  }
  return Payload(w.take());
}

std::vector<SignedChain> decode_chains(const Payload& payload) {
  ByteReader r(payload.bytes());
  auto count = r.varint();
  if (count > r.remaining()) throw DecodeError("chain count exceeds payload");
  std::vector<SignedChain> out;
  for (std::uint64_t i = 0; i < count; ++i) {
    SignedChain c;
    c.instance = static_cast<int>(r.varint());
    c.value = r.svarint();
    auto sigs = r.varint();
    if (sigs > r.remaining()) throw DecodeError("signature count exceeds payload");
    for (std::uint64_t k = 0; k < sigs; ++k) {
      SignatureToken s;
      s.signer = ProcessId(static_cast<int>(r.varint()));
      s.digest = r.u64();
      c.signatures.push_back(s);
    }
    out.push_back(std::move(c));
  }
  if (!r.done()) throw DecodeError("trailing bytes after chains");
  return out;
}

namespace {

// A chain counts in round r if it carries at least r distinct valid
// signatures, starts with its instance's owner and does not include `self`.
bool acceptable(const SignedChain& c, int round, int n, ProcessId self) {
  if (c.instance < 1 || c.instance > n || c.instance == self.index) return false;
  if (static_cast<int>(c.signatures.size()) < round) return false;
  if (c.signatures.empty() || c.signatures.front().signer.index != c.instance) return false;
  std::set<ProcessId> signers;
  auto content = chain_content(c.instance, c.value);
  for (const auto& s : c.signatures) {
    if (s.signer == self || !signers.insert(s.signer).second) return false;
    if (!verify(s, content)) return false;
  }
  return true;
}

using Extracted = std::vector<std::vector<std::int64_t>>;  // per instance, at most two values

Bytes encode_extracted(const Extracted& ext) {
  ByteWriter w;
  w.varint(ext.size());
  for (const auto& vals : ext) {
    w.varint(vals.size());
    for (auto v : vals) w.svarint(v);
  }
  return w.take();
}

Extracted decode_extracted(const Bytes& b) {
  ByteReader r(b);
  Extracted ext(r.varint());
  for (auto& vals : ext) {
    vals.resize(r.varint());
    for (auto& v : vals) v = r.svarint();
  }
  return ext;
}

class DolevStrongIc final : public Algorithm {
 public:
  DolevStrongIc(int n, int t, std::int64_t fallback) : n_(n), t_(t), fallback_(fallback) {
    if (n < 2 || t < 0 || t >= n) throw std::invalid_argument("interactive consistency needs 0 <= t < n");
  }

  std::string id() const override { return "ds-ic"; }

  Step initial(std::int64_t proposal, const ProcessContext& ctx) const override {
    require_context(ctx);
    Extracted ext(static_cast<std::size_t>(n_));
    ext[static_cast<std::size_t>(ctx.self.index - 1)] = {proposal};
    SignedChain own{ctx.self.index, proposal, {ctx.signer->sign(chain_content(ctx.self.index, proposal))}};
    return {make_state(ctx, 1, proposal, std::nullopt, encode_extracted(ext)), broadcast(ctx, encode_chains({own}))};
  }

  Step transition(const ProcState& s, std::span<const Message> received, const ProcessContext& ctx) const override {
    require_context(ctx);
    Extracted ext = decode_extracted(s.internal.bytes());
    ProcState next{s.process, s.round + 1, s.proposal, s.decision, s.internal};
    if (s.decision || s.round > t_ + 1) return {std::move(next), {}};
    const int r = s.round;
    std::vector<SignedChain> relays;
    for (const auto& m : received) {
      std::vector<SignedChain> chains;
      try {
        chains = decode_chains(m.payload);
      } catch (const DecodeError&) {
        continue;
      }
      for (auto& c : chains) {
        if (!acceptable(c, r, n_, ctx.self)) continue;
        auto& vals = ext[static_cast<std::size_t>(c.instance - 1)];
        if (vals.size() >= 2 || std::find(vals.begin(), vals.end(), c.value) != vals.end()) continue;
        vals.push_back(c.value);
        if (r < t_ + 1) {
          c.signatures.push_back(ctx.signer->sign(chain_content(c.instance, c.value)));
          relays.push_back(std::move(c));
        }
      }
    }
    if (r == t_ + 1) next.decision = vector_of(ext, ctx.self, s.proposal);
    next.internal = StateBlob(encode_extracted(ext));
    std::vector<Outgoing> sends;
    if (!relays.empty()) sends = broadcast(ctx, encode_chains(relays));
    return {std::move(next), std::move(sends)};
  }

 private:
  void require_context(const ProcessContext& ctx) const {
    if (ctx.n != n_ || ctx.t != t_ || !ctx.signer) throw std::invalid_argument("interactive consistency built for another system");
  }

  Value vector_of(const Extracted& ext, ProcessId self, std::int64_t proposal) const {
    Value v(static_cast<std::size_t>(n_), fallback_);
    for (int i = 0; i < n_; ++i)
      if (ext[static_cast<std::size_t>(i)].size() == 1) v[static_cast<std::size_t>(i)] = ext[static_cast<std::size_t>(i)][0];
    v[static_cast<std::size_t>(self.index - 1)] = proposal;
    return v;
  }

  int n_;
  int t_;
  std::int64_t fallback_;
};

std::vector<ProcessId> outsiders(const ByzantineContext& ctx) {
  std::vector<ProcessId> out;
  for (int i = 1; i <= ctx.n; ++i)
    if (!ctx.coalition->contains(ProcessId(i))) out.emplace_back(i);
  return out;
}

// Chain for `self`'s own instance signed by `length` coalition members,
// `self` first; empty if the coalition is too small.
std::optional<SignedChain> coalition_chain(const ByzantineContext& ctx, std::int64_t value, int length) {
  if (length < 1 || static_cast<int>(ctx.coalition->size()) < length) return std::nullopt;
  auto content = chain_content(ctx.self.index, value);
  SignedChain c{ctx.self.index, value, {ctx.signer->sign_as(ctx.self, content)}};
  for (auto p : *ctx.coalition) {
    if (static_cast<int>(c.signatures.size()) == length) break;
    if (p != ctx.self) c.signatures.push_back(ctx.signer->sign_as(p, content));
  }
  return c;
}

class Silent final : public ByzantineBehavior {
 public:
  std::string id() const override { return "silent"; }
  std::vector<Outgoing> act(const ByzantineContext&) const override { return {}; }
};

// Round 1: value 0 to one half of the correct processes and 1 to the other.
// Later rounds: coalition-signed chains for both values plus relays of
// everything seen.
class Equivocator final : public ByzantineBehavior {
 public:
  std::string id() const override { return "equivocator"; }
  std::vector<Outgoing> act(const ByzantineContext& ctx) const override {
    auto targets = outsiders(ctx);
    std::vector<Outgoing> out;
    if (ctx.round > ctx.t + 1 || targets.empty()) return out;
    if (ctx.round == 1) {
      auto half = targets.size() / 2;
      for (std::size_t i = 0; i < targets.size(); ++i) {
        std::int64_t v = i < half ? 0 : 1;
        auto c = coalition_chain(ctx, v, 1);
        out.push_back(Outgoing{targets[i], encode_chains({*c})});
      }
      return out;
    }
    std::vector<SignedChain> bundle;
    for (std::int64_t v : {0, 1})
      if (auto c = coalition_chain(ctx, v, ctx.round)) bundle.push_back(*c);
    std::set<std::pair<int, std::int64_t>> seen;
    for (const auto& m : ctx.observed) {
      if (m.round != ctx.round - 1) continue;
      std::vector<SignedChain> chains;
      try {
        chains = decode_chains(m.payload);
      } catch (const DecodeError&) {
        continue;
      }
      for (auto& c : chains) {
        if (!acceptable(c, ctx.round - 1, ctx.n, ctx.self) || !seen.insert({c.instance, c.value}).second) continue;
        c.signatures.push_back(ctx.signer->sign_as(ctx.self, chain_content(c.instance, c.value)));
        bundle.push_back(std::move(c));
      }
    }
    if (bundle.empty()) return out;
    auto payload = encode_chains(bundle);
    for (auto p : targets) out.push_back(Outgoing{p, payload});
    return out;
  }
};

// Stays quiet, then hands a chain with as many signatures as the coalition
// has members to a single correct process in the last round it is valid.
class Withholder final : public ByzantineBehavior {
 public:
  std::string id() const override { return "withholder"; }
  std::vector<Outgoing> act(const ByzantineContext& ctx) const override {
    auto targets = outsiders(ctx);
    int k = static_cast<int>(ctx.coalition->size());
    if (targets.empty() || ctx.round != k || ctx.round > ctx.t + 1) return {};
    auto c = coalition_chain(ctx, 1, k);
    return {Outgoing{targets.front(), encode_chains({*c})}};
  }
};

// Broadcasts 0 honestly in round 1, then tries to slip a conflicting value
// with too few signatures into the final round.
class LateInjector final : public ByzantineBehavior {
 public:
  std::string id() const override { return "late-injector"; }
  std::vector<Outgoing> act(const ByzantineContext& ctx) const override {
    auto targets = outsiders(ctx);
    std::vector<Outgoing> out;
    if (targets.empty()) return out;
    if (ctx.round == 1) {
      auto payload = encode_chains({*coalition_chain(ctx, 0, 1)});
      for (auto p : targets) out.push_back(Outgoing{p, payload});
    }
    if (ctx.round == ctx.t + 1 && ctx.round > 1) {
      int len = std::min<int>(static_cast<int>(ctx.coalition->size()), ctx.t);
      if (auto c = coalition_chain(ctx, 1, len)) out.push_back(Outgoing{targets.front(), encode_chains({*c})});
    }
    return out;
  }
};

}  // namespace

AlgorithmRef interactive_consistency(int n, int t, std::int64_t fallback) {
  return std::make_shared<DolevStrongIc>(n, t, fallback);
}

ByzantineRef byzantine_silent() { return std::make_shared<Silent>(); }
ByzantineRef byzantine_equivocator() { return std::make_shared<Equivocator>(); }
ByzantineRef byzantine_withholder() { return std::make_shared<Withholder>(); }
ByzantineRef byzantine_late_injector() { return std::make_shared<LateInjector>(); }

std::vector<ByzantineRef> byzantine_menu() {
  return {byzantine_silent(), byzantine_equivocator(), byzantine_withholder(), byzantine_late_injector()};
}

ByzantineRef byzantine_behavior(const std::string& id) {
  for (auto& b : byzantine_menu())
    if (b->id() == id) return b;
  throw std::invalid_argument("unknown Byzantine behavior '" + id + "'");
}

}  // namespace roundsim
