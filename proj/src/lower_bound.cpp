#include "roundsim/lower_bound.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>

#include "roundsim/trace_io.hpp"

namespace roundsim {

using nlohmann::json;

std::string to_string(Property p) {
  switch (p) {
    case Property::agreement: return "agreement";
    case Property::termination: return "termination";
    case Property::weak_validity: return "weak-validity";
  }
  return "?";
}

std::string to_string(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::violation: return "violation";
    case Verdict::Kind::budget_exceeded: return "budget-exceeded";
    case Verdict::Kind::inconsistent: return "inconsistent";
  }
  return "?";
}

std::size_t message_budget(int t) { return static_cast<std::size_t>(t) * static_cast<std::size_t>(t) / 32; }

std::optional<PropertyViolation> check_weak_consensus(const Execution& e) {
  auto d = decisions(e);
  auto correct = e.correct();
  if (e.faulty.empty() && e.horizon > 0) {
    auto v = e.behaviors.front().fragments.front().state.proposal;
    bool unanimous = std::all_of(e.behaviors.begin(), e.behaviors.end(), [&](const Behavior& b) {
      return b.fragments.front().state.proposal == v;
    });
    if (unanimous) {
      PropertyViolation pv{Property::weak_validity, {}};
      for (auto p : correct)
        if (d.of(p) && *d.of(p) != scalar(v)) pv.offending.push_back(p);
      if (!pv.offending.empty()) return pv;
    }
  }
  std::optional<ProcessId> first;
  for (auto p : correct) {
    if (!d.of(p)) continue;
    if (!first)
      first = p;
    else if (*d.of(p) != *d.of(*first))
      return PropertyViolation{Property::agreement, {*first, p}};
  }
  PropertyViolation pv{Property::termination, {}};
  for (auto p : correct)
    if (!d.of(p)) pv.offending.push_back(p);
  if (!pv.offending.empty()) return pv;
  return std::nullopt;
}

json verdict_to_json(const Verdict& v, bool include_witness) {
  json j;
  j["kind"] = to_string(v.kind);
  j["algorithm"] = v.algorithm;
  j["n"] = v.n;
  j["t"] = v.t;
  j["budget"] = v.budget;
  j["stage"] = v.stage;
  if (v.property) j["property"] = to_string(*v.property);
  j["offending"] = json::array();
  for (auto p : v.offending) j["offending"].push_back(p.index);
  if (v.kind == Verdict::Kind::budget_exceeded) {
    j["max_messages"] = v.max_messages;
    j["probe"] = v.probe;
  }
  if (!v.reason.empty()) j["reason"] = v.reason;
  j["probes"] = json::array();
  for (const auto& r : v.probes) j["probes"].push_back(json{{"name", r.name}, {"messages", r.messages}});
  if (include_witness && v.witness) j["witness"] = execution_to_json(*v.witness);
  return j;
}

namespace {

void check_parameters(int n, int t) {
  if (t < 8 || t % 8 != 0 || t >= n)
    throw std::invalid_argument("falsification needs t >= 8, t divisible by 8 and t < n (got n = " +
                                std::to_string(n) + ", t = " + std::to_string(t) + ")");
}

Verdict base_verdict(const Algorithm& alg, int n, int t) {
  Verdict v;
  v.algorithm = alg.id();
  v.n = n;
  v.t = t;
  v.budget = message_budget(t);
  return v;
}

Verdict violation_verdict(Verdict v, std::string stage, const PropertyViolation& pv, Execution witness) {
  v.kind = Verdict::Kind::violation;
  v.stage = std::move(stage);
  v.property = pv.property;
  v.offending = pv.offending;
  v.witness = std::move(witness);
  return v;
}

Verdict budget_verdict(Verdict v, const std::string& probe, std::size_t count) {
  v.kind = Verdict::Kind::budget_exceeded;
  v.stage = probe;
  v.probe = probe;
  v.max_messages = count;
  return v;
}

std::optional<Value> common_decision(const Execution& e, const std::vector<ProcessId>& group) {
  auto d = decisions(e);
  std::optional<Value> out;
  for (auto p : group) {
    if (!d.of(p)) return std::nullopt;
    if (!out)
      out = d.of(p);
    else if (*out != *d.of(p))
      return std::nullopt;
  }
  return out;
}

struct ProbeSpec {
  std::string name;
  IsolatedGroup group;
  int from_round;
  int bit;
};

std::string probe_name(const ProbeSpec& s) {
  return "E" + std::to_string(s.bit) + "^" + (s.group == IsolatedGroup::b ? "B" : "C") + "(" +
         std::to_string(s.from_round) + ")";
}

std::vector<Probe> run_probes(const Algorithm& alg, int n, int t, const Partition& part, int horizon,
                              const std::vector<ProbeSpec>& specs, int jobs) {
  auto one = [&](const ProbeSpec& s) {
    auto group = s.group == IsolatedGroup::b ? part.set_b() : part.set_c();
    RunOptions opts;
    opts.tag = ScenarioTag{s.group, s.from_round, s.bit};
    auto props = uniform_proposals(n, s.bit);
    Probe p{s.name, run(alg, t, props, isolation_schedule(group, s.from_round, s.name), horizon, opts), {}, 0};
    p.a_decision = common_decision(p.execution, part.a);
    p.messages = message_complexity(p.execution);
    return p;
  };
  std::vector<Probe> out;
  out.reserve(specs.size());
  if (jobs <= 1) {
    for (const auto& s : specs) out.push_back(one(s));
    return out;
  }
  for (std::size_t i = 0; i < specs.size(); i += static_cast<std::size_t>(jobs)) {
    std::vector<std::future<Probe>> batch;
    for (std::size_t k = i; k < std::min(specs.size(), i + static_cast<std::size_t>(jobs)); ++k)
      batch.push_back(std::async(std::launch::async, one, std::cref(specs[k])));
    for (auto& f : batch) out.push_back(f.get());
  }
  return out;
}

std::vector<ProbeSpec> family_specs(IsolatedGroup g, int bit, int count) {
  std::vector<ProbeSpec> out;
  for (int k = 1; k <= count; ++k) {
    ProbeSpec s{"", g, k, bit};
    s.name = probe_name(s);
    out.push_back(s);
  }
  return out;
}

// Evaluates a probe in order: direct violation first, then budget.
std::optional<Verdict> screen(const Verdict& base, const Probe& p, std::vector<ProbeRecord>& records) {
  records.push_back(ProbeRecord{p.name, p.messages});
  if (auto pv = check_weak_consensus(p.execution)) {
    auto v = violation_verdict(base, p.name, *pv, p.execution);
    v.probes = records;
    return v;
  }
  if (p.messages >= base.budget) {
    auto v = budget_verdict(base, p.name, p.messages);
    v.probes = records;
    return v;
  }
  return std::nullopt;
}

}  // namespace

std::variant<DecisionRound, Verdict> find_decision_round(const Algorithm& candidate, int n, int t,
                                                         const FalsifyOptions& options, int bit) {
  check_parameters(n, t);
  RunOptions opts;
  opts.stop_after_decided = 2;
  opts.tag = ScenarioTag{IsolatedGroup::none, 0, bit};
  AdversarySchedule none;
  none.id = "E" + std::to_string(bit);
  auto props = uniform_proposals(n, bit);
  Execution e = run(candidate, t, props, none, options.horizon_cap, opts);
  if (auto pv = check_weak_consensus(e)) {
    auto v = violation_verdict(base_verdict(candidate, n, t), none.id, *pv, e);
    v.probes.push_back(ProbeRecord{none.id, message_complexity(e)});
    return v;
  }
  auto d = decisions(e);
  int r_max = 1;
  for (const auto& r : d.first_round) r_max = std::max(r_max, r.value_or(e.horizon));
  return DecisionRound{std::move(e), r_max};
}

std::variant<ProbeFamily, Verdict> probe_isolated_family(const Algorithm& candidate, int n, int t,
                                                         const FalsifyOptions& options) {
  check_parameters(n, t);
  const Verdict base = base_verdict(candidate, n, t);
  ProbeFamily fam;
  fam.n = n;
  fam.t = t;
  fam.partition = Partition::canonical(n, t);

  for (int bit : {0, 1}) {
    auto r = find_decision_round(candidate, n, t, options, bit);
    if (auto* v = std::get_if<Verdict>(&r)) {
      v->probes.insert(v->probes.begin(), fam.records.begin(), fam.records.end());
      return *v;
    }
    auto& dr = std::get<DecisionRound>(r);
    auto name = "E" + std::to_string(bit);
    auto count = message_complexity(dr.base);
    fam.records.push_back(ProbeRecord{name, count});
    if (count >= base.budget) {
      auto v = budget_verdict(base, name, count);
      v.probes = fam.records;
      return v;
    }
    (bit == 0 ? fam.zero : fam.one) = std::move(dr);
  }

  fam.horizon = std::min(options.horizon_cap, 2 * std::max(fam.zero.r_max, fam.one.r_max) + 4);
  auto run_family = [&](std::vector<ProbeSpec> specs) {
    return run_probes(candidate, n, t, fam.partition, fam.horizon, specs, options.jobs);
  };

  auto specs = family_specs(IsolatedGroup::b, 0, fam.zero.r_max);
  auto c_specs = family_specs(IsolatedGroup::c, 0, fam.zero.r_max);
  specs.insert(specs.end(), c_specs.begin(), c_specs.end());
  specs.push_back(family_specs(IsolatedGroup::c, 1, 1).front());
  auto probes = run_family(specs);
  for (const auto& p : probes)
    if (auto v = screen(base, p, fam.records)) return *v;
  auto r0 = static_cast<std::size_t>(fam.zero.r_max);
  fam.b_zero.assign(probes.begin(), probes.begin() + static_cast<std::ptrdiff_t>(r0));
  fam.c_zero.assign(probes.begin() + static_cast<std::ptrdiff_t>(r0), probes.begin() + static_cast<std::ptrdiff_t>(2 * r0));
  fam.c_one_first = probes.back();
  fam.default_bit = static_cast<int>(fam.b_zero.front().a_decision->front());

  if (fam.default_bit == 0) {
    auto mirror = family_specs(IsolatedGroup::c, 1, fam.one.r_max);
    mirror.erase(mirror.begin());
    auto b_specs = family_specs(IsolatedGroup::b, 1, fam.one.r_max);
    mirror.insert(mirror.end(), b_specs.begin(), b_specs.end());
    auto more = run_family(mirror);
    for (const auto& p : more)
      if (auto v = screen(base, p, fam.records)) return *v;
    auto r1 = static_cast<std::size_t>(fam.one.r_max);
    fam.c_one.push_back(fam.c_one_first);
    fam.c_one.insert(fam.c_one.end(), more.begin(), more.begin() + static_cast<std::ptrdiff_t>(r1 - 1));
    fam.b_one.assign(more.begin() + static_cast<std::ptrdiff_t>(r1 - 1), more.end());
  }
  return fam;
}

int max_heavy_receivers(int group_size, std::size_t total, std::size_t threshold) {
  if (total == 0) return 0;
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(group_size), (total - 1) / threshold));
}

MajorityOutcome majority_check(const Execution& e, const ProcessSet& x, const ProcessSet& y, const ProcessSet& z,
                               int k) {
  MajorityOutcome out;
  auto fail = [&](std::string why) {
    out.kind = MajorityOutcome::Kind::not_applicable;
    out.reason = std::move(why);
    return out;
  };
  if (static_cast<int>(y.size()) != e.t / 4 || static_cast<int>(z.size()) > e.t / 4)
    return fail("partition shape must be |Y| = t/4 and |Z| <= t/4");
  if (static_cast<int>(x.size() + y.size() + z.size()) != e.n) return fail("X, Y, Z do not cover the processes");
  for (auto p : x)
    if (!e.is_correct(p)) return fail("X contains faulty process " + to_string(p));
  if (!check_isolated(e, y, k)) return fail("Y is not isolated from round " + std::to_string(k));
  auto d = decisions(e);
  std::optional<Value> bx;
  for (auto p : x) {
    if (!d.of(p) || (bx && *bx != *d.of(p))) return fail("X is not unanimous");
    bx = d.of(p);
  }
  if (message_complexity(e) >= message_budget(e.t)) return fail("execution is not below the message budget");

  for (auto p : y)
    if (d.of(p) == bx) ++out.y_agreeing;
  if (2 * out.y_agreeing > static_cast<int>(y.size())) {
    out.kind = MajorityOutcome::Kind::majority_holds;
    return out;
  }

  for (auto p : y) {
    if (d.of(p) == bx) continue;
    auto omitted = MessageSets(e.behavior(p)).all_receive_omitted();
    std::size_t from_x = 0;
    ProcessSet senders;
    for (const auto& m : omitted) {
      senders.insert(m.sender);
      if (x.contains(m.sender)) ++from_x;
    }
    if (2 * from_x >= static_cast<std::size_t>(e.t)) continue;
    auto swapped = swap_omission(e, p);
    if (!swapped.within_resilience) continue;
    std::optional<ProcessId> helper;
    for (auto q : x)
      if (!senders.contains(q) && !swapped.execution.faulty.contains(q)) {
        helper = q;
        break;
      }
    if (!helper || swapped.execution.faulty.contains(p)) continue;
    out.kind = MajorityOutcome::Kind::violation;
    out.violation = d.of(p) ? PropertyViolation{Property::agreement, {std::min(p, *helper), std::max(p, *helper)}}
                            : PropertyViolation{Property::termination, {p}};
    out.witness = std::move(swapped.execution);
    return out;
  }
  return fail("no dissenter in Y with fewer than t/2 omitted messages from X");
}

int critical_round(const std::vector<int>& series) {
  for (std::size_t r = 0; r + 1 < series.size(); ++r)
    if (series[r] == series.front() && series[r + 1] != series.front()) return static_cast<int>(r + 1);
  throw std::logic_error("internal inconsistency: decision series never switches");
}

CriticalRound critical_round(const ProbeFamily& family) {
  const auto& probes = family.default_bit == 1 ? family.b_zero : family.c_one;
  std::vector<int> series;
  for (const auto& p : probes) {
    if (!p.a_decision) throw std::logic_error("internal inconsistency: group A undecided in " + p.name);
    series.push_back(static_cast<int>(p.a_decision->front()));
  }
  return CriticalRound{critical_round(series), family.default_bit == 0};
}

Verdict falsify(const Algorithm& candidate, int n, int t, const FalsifyOptions& options) {
  check_parameters(n, t);
  Verdict base = base_verdict(candidate, n, t);
  auto fam_or = probe_isolated_family(candidate, n, t, options);
  if (auto* v = std::get_if<Verdict>(&fam_or)) return *v;
  auto& fam = std::get<ProbeFamily>(fam_or);
  const auto& part = fam.partition;
  auto a = part.set_a(), b = part.set_b(), c = part.set_c();
  auto a_b = a, a_c = a;
  a_b.insert(b.begin(), b.end());
  a_c.insert(c.begin(), c.end());

  auto finish = [&](Verdict v) {
    v.probes = fam.records;
    if (v.witness) {
      auto problems = validate_execution(*v.witness, &candidate);
      if (!problems.empty()) {
        v.kind = Verdict::Kind::inconsistent;
        v.reason = "constructed witness is not an execution: " + to_string(problems.front());
      }
    }
    return v;
  };
  auto check = [&](const Execution& e, const std::string& name, const ProcessSet& x, const ProcessSet& y,
                   const ProcessSet& z, int k) -> std::optional<Verdict> {
    auto m = majority_check(e, x, y, z, k);
    if (m.kind != MajorityOutcome::Kind::violation) return std::nullopt;
    std::string stage = "majority check on " + name + " (Y = " + (y == b ? "B" : "C") + ")";
    return finish(violation_verdict(base, stage, *m.violation, std::move(*m.witness)));
  };

  std::vector<const Probe*> singles;
  for (const auto* fam_part : {&fam.b_zero, &fam.c_zero, &fam.c_one, &fam.b_one})
    for (const auto& p : *fam_part) singles.push_back(&p);
  if (fam.c_one.empty()) singles.push_back(&fam.c_one_first);
  for (const auto* p : singles) {
    bool isolates_b = p->execution.tag->group == IsolatedGroup::b;
    if (auto v = check(p->execution, p->name, isolates_b ? a_c : a_b, isolates_b ? b : c, {},
                       p->execution.tag->from_round))
      return *v;
  }

  auto try_merge = [&](const Probe& left, const Probe& right) -> std::optional<Verdict> {
    Execution merged = merge(left.execution, right.execution, part, candidate);
    std::string name = "merge(" + left.name + "," + right.name + ")";
    auto count = message_complexity(merged);
    fam.records.push_back(ProbeRecord{name, count});
    if (auto pv = check_weak_consensus(merged)) return finish(violation_verdict(base, name, *pv, merged));
    if (count >= base.budget) return finish(budget_verdict(base, name, count));
    if (auto v = check(merged, name, a, b, c, left.execution.tag->from_round)) return v;
    if (auto v = check(merged, name, a, c, b, right.execution.tag->from_round)) return v;
    return std::nullopt;
  };

  if (fam.b_zero.front().a_decision != fam.c_one_first.a_decision)
    if (auto v = try_merge(fam.b_zero.front(), fam.c_one_first)) return *v;

  CriticalRound cr;
  try {
    cr = critical_round(fam);
  } catch (const std::logic_error& ex) {
    Verdict v = base;
    v.kind = Verdict::Kind::inconsistent;
    v.stage = "critical round";
    v.reason = ex.what();
    return finish(v);
  }
  auto r = static_cast<std::size_t>(cr.round);
  std::vector<std::pair<const Probe*, const Probe*>> pairs;
  if (!cr.mirrored) {
    pairs = {{&fam.b_zero[r - 1], &fam.c_zero[r - 1]}, {&fam.b_zero[r], &fam.c_zero[r - 1]}};
  } else {
    pairs = {{&fam.b_one[r - 1], &fam.c_one[r - 1]}, {&fam.b_one[r - 1], &fam.c_one[r]}};
  }
  for (auto [left, right] : pairs)
    if (auto v = try_merge(*left, *right)) return *v;

  Verdict v = base;
  v.kind = Verdict::Kind::inconsistent;
  v.stage = "critical round " + std::to_string(cr.round);
  v.reason = "no construction produced a violation although every probe is under budget";
  return finish(v);
}

}  // namespace roundsim
