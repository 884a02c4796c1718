#include "roundsim/reductions.hpp"

#include <stdexcept>

namespace roundsim {

namespace {

// The inner algorithm's state travels inside the wrapper's internal bytes.
Bytes pack_inner(const ProcState& inner) {
  ByteWriter w;
  w.svarint(inner.proposal);
  w.varint(inner.decision ? 1 : 0);
  if (inner.decision) {
    w.varint(inner.decision->size());
    for (auto x : *inner.decision) w.svarint(x);
  }
  w.bytes(inner.internal.bytes());
  return w.take();
}

ProcState unpack_inner(const ProcState& outer) {
  ByteReader r(outer.internal.bytes());
  ProcState inner;
  inner.process = outer.process;
  inner.round = outer.round;
  inner.proposal = r.svarint();
  if (r.varint()) {
    Value v(r.varint());
    for (auto& x : v) x = r.svarint();
    inner.decision = std::move(v);
  }
  inner.internal = StateBlob(r.bytes());
  return inner;
}

// Shared plumbing: maps outer proposals to inner ones and inner decisions to
// outer ones, passing messages through untouched.
class Wrapper : public Algorithm {
 public:
  explicit Wrapper(AlgorithmRef inner) : inner_(std::move(inner)) {}

  Step initial(std::int64_t proposal, const ProcessContext& ctx) const override {
    Step in = inner_->initial(inner_proposal(proposal, ctx), ctx);
    return {wrap(in.state, proposal), std::move(in.sends)};
  }

  Step transition(const ProcState& s, std::span<const Message> received, const ProcessContext& ctx) const override {
    ProcState inner = unpack_inner(s);
    Step in = inner_->transition(inner, received, ctx);
    ProcState next = wrap(in.state, s.proposal);
    if (s.decision) next.decision = s.decision;
    return {std::move(next), std::move(in.sends)};
  }

 protected:
  virtual std::int64_t inner_proposal(std::int64_t proposal, const ProcessContext& ctx) const = 0;
  virtual Value outer_decision(const Value& inner) const = 0;
  const AlgorithmRef& inner() const { return inner_; }

 private:
  ProcState wrap(const ProcState& in, std::int64_t proposal) const {
    std::optional<Value> d;
    if (in.decision) d = outer_decision(*in.decision);
    return ProcState{in.process, in.round, proposal, std::move(d), StateBlob(pack_inner(in))};
  }

  AlgorithmRef inner_;
};

class WeakFromAgreement final : public Wrapper {
 public:
  WeakFromAgreement(AlgorithmRef inner, AnchorSet anchors) : Wrapper(std::move(inner)), anchors_(std::move(anchors)) {}
  std::string id() const override { return "weak-from(" + inner()->id() + ")"; }

 protected:
  std::int64_t inner_proposal(std::int64_t proposal, const ProcessContext& ctx) const override {
    if (proposal != 0 && proposal != 1) throw std::invalid_argument("weak consensus proposals are bits");
    const auto& c = proposal == 0 ? anchors_.c0 : anchors_.c1;
    return *c.at(ctx.self);
  }
  Value outer_decision(const Value& inner) const override { return scalar(inner == anchors_.v0 ? 0 : 1); }

 private:
  AnchorSet anchors_;
};

class AgreementFromIc final : public Wrapper {
 public:
  AgreementFromIc(PropertyRef property, GammaTable gamma)
      : Wrapper(interactive_consistency(property->context().n, property->context().t, property->context().inputs.front())),
        property_(std::move(property)),
        gamma_(std::move(gamma)) {}
  std::string id() const override { return "agreement-via-ic(" + property_->name() + ")"; }

 protected:
  std::int64_t inner_proposal(std::int64_t proposal, const ProcessContext&) const override {
    const auto& in = property_->context().inputs;
    if (!std::binary_search(in.begin(), in.end(), proposal))
      throw std::invalid_argument("proposal " + std::to_string(proposal) + " is outside the input domain");
    return proposal;
  }
  Value outer_decision(const Value& inner) const override { return gamma_.select(InputConfiguration::full(inner)); }

 private:
  PropertyRef property_;
  GammaTable gamma_;
};

std::optional<Value> unanimous(const Execution& e) {
  auto d = decisions(e);
  std::optional<Value> out;
  for (const auto& v : d.value) {
    if (!v || (out && *out != *v)) return std::nullopt;
    out = v;
  }
  return out;
}

Value run_fault_free(const Algorithm& alg, const InputConfiguration& c, int t, int cap) {
  RunOptions opts;
  opts.stop_after_decided = 1;
  AdversarySchedule none;
  auto props = c.as_value();
  auto e = run(alg, t, props, none, cap, opts);
  auto v = unanimous(e);
  if (!v) throw ReductionError("agreement algorithm did not decide unanimously on " + to_string(c));
  return *v;
}

// First configuration in lexicographic order (absent entries first)
// satisfying `pred`.
template <typename Pred>
std::optional<InputConfiguration> first_configuration(const ValueContext& ctx, Pred pred) {
  std::vector<std::optional<std::int64_t>> entries(static_cast<std::size_t>(ctx.n));
  std::optional<InputConfiguration> found;
  auto rec = [&](auto&& self, int pos, int present) -> void {
    if (found) return;
    if (pos == ctx.n) {
      InputConfiguration c(entries);
      if (present >= ctx.n - ctx.t && pred(c)) found = std::move(c);
      return;
    }
    auto idx = static_cast<std::size_t>(pos);
    if (present + (ctx.n - pos - 1) >= ctx.n - ctx.t) {
      entries[idx] = std::nullopt;
      self(self, pos + 1, present);
    }
    for (auto v : ctx.inputs) {
      if (found) return;
      entries[idx] = v;
      self(self, pos + 1, present + 1);
    }
    entries[idx] = std::nullopt;
  };
  rec(rec, 0, 0);
  return found;
}

}  // namespace

AnchorSet derive_anchors(const Algorithm& agreement, const ValidityProperty& property, int horizon_cap) {
  const auto& ctx = property.context();
  AnchorSet a;
  a.c0 = InputConfiguration::full(std::vector<std::int64_t>(static_cast<std::size_t>(ctx.n), ctx.inputs.front()));
  a.v0 = run_fault_free(agreement, a.c0, ctx.t, horizon_cap);

  std::optional<InputConfiguration> best;
  for (const auto& [c, set] : property.overrides())
    if (!set.contains(a.v0)) {
      best = c;
      break;
    }
  if (!property.fallback().contains(a.v0)) {
    auto plain = first_configuration(ctx, [&](const InputConfiguration& c) { return !property.overrides().contains(c); });
    if (plain && (!best || *plain < *best)) best = plain;
  }
  if (!best) throw ReductionError("v0 = " + to_string(a.v0) + " is admissible everywhere; the property is trivial");
  a.c1_star = *best;
  std::vector<std::int64_t> full;
  for (const auto& e : a.c1_star.entries()) full.push_back(e.value_or(ctx.inputs.front()));
  a.c1 = InputConfiguration::full(full);
  a.v1 = run_fault_free(agreement, a.c1, ctx.t, horizon_cap);
  if (a.v1 == a.v0)
    throw ReductionError("agreement algorithm decided " + to_string(a.v0) + " on " + to_string(a.c1) +
                         " although it is not admissible for " + to_string(a.c1_star));
  return a;
}

AlgorithmRef weak_from_agreement(AlgorithmRef agreement, AnchorSet anchors) {
  return std::make_shared<WeakFromAgreement>(std::move(agreement), std::move(anchors));
}

AlgorithmRef val_agreement_from_ic(PropertyRef property, GammaTable gamma) {
  if (!check_cc(property).holds)
    throw ReductionError("property " + property->name() + " violates the containment condition");
  return std::make_shared<AgreementFromIc>(std::move(property), std::move(gamma));
}

AlgorithmRef val_agreement_from_ic(PropertyRef property) {
  auto cc = check_cc(property);
  if (!cc.holds) throw ReductionError("property " + property->name() + " violates the containment condition");
  return std::make_shared<AgreementFromIc>(std::move(property), std::move(*cc.gamma));
}

AlgorithmRef reference_weak_consensus(int n, int t) {
  auto property = weak_validity(binary_context(n, t));
  auto agreement = val_agreement_from_ic(property);
  auto anchors = derive_anchors(*agreement, *property);
  return weak_from_agreement(agreement, anchors);
}

}  // namespace roundsim
