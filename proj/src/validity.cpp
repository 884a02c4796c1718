#include "roundsim/validity.hpp"

#include <algorithm>
#include <limits>

namespace roundsim {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > kSaturated - b ? kSaturated : a + b; }

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > kSaturated / b ? kSaturated : a * b;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (r > kSaturated) return kSaturated;
  }
  return static_cast<std::uint64_t>(r);
}

std::uint64_t sat_pow(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) r = sat_mul(r, base);
  return r;
}

void require_bound(std::uint64_t count, const std::string& what) {
  if (count > kEnumerationBound)
    throw EnumerationBoundExceeded(what + " has " + (count == kSaturated ? std::string("too many") : std::to_string(count)) +
                                   " members; the enumeration bound is " + std::to_string(kEnumerationBound));
}

// Calls f on every assignment of positions [pos, n) drawn from `choices`
// (nullopt first), in lexicographic order, keeping at least `min_present`
// present entries overall.
template <typename F>
void extend(std::vector<std::optional<std::int64_t>>& entries, std::size_t pos, int present, int min_present,
            const std::vector<std::optional<std::int64_t>>& fixed, const std::vector<std::int64_t>& values, F& f) {
  if (pos == entries.size()) {
    if (present >= min_present) f(InputConfiguration(entries));
    return;
  }
  int remaining = static_cast<int>(entries.size() - pos);
  if (fixed[pos]) {
    entries[pos] = fixed[pos];
    extend(entries, pos + 1, present + 1, min_present, fixed, values, f);
    return;
  }
  if (present + remaining - 1 >= min_present) {
    entries[pos] = std::nullopt;
    extend(entries, pos + 1, present, min_present, fixed, values, f);
  }
  for (auto v : values) {
    entries[pos] = v;
    extend(entries, pos + 1, present + 1, min_present, fixed, values, f);
  }
}

template <typename F>
void for_each_superset(const InputConfiguration& base, const ValueContext& ctx, F f) {
  std::vector<std::optional<std::int64_t>> entries(static_cast<std::size_t>(ctx.n));
  extend(entries, 0, 0, ctx.n - ctx.t, base.entries(), ctx.inputs, f);
}

}  // namespace

ValueContext binary_context(int n, int t) { return ValueContext{n, t, {0, 1}}; }

InputConfiguration::InputConfiguration(std::vector<std::optional<std::int64_t>> entries) : entries_(std::move(entries)) {}

InputConfiguration InputConfiguration::full(const std::vector<std::int64_t>& proposals) {
  std::vector<std::optional<std::int64_t>> e(proposals.begin(), proposals.end());
  return InputConfiguration(std::move(e));
}

const std::optional<std::int64_t>& InputConfiguration::at(ProcessId p) const {
  if (p.index < 1 || p.index > n()) throw std::out_of_range("no entry for " + to_string(p));
  return entries_[static_cast<std::size_t>(p.index - 1)];
}

std::vector<ProcessId> InputConfiguration::processes() const {
  std::vector<ProcessId> out;
  for (int i = 0; i < n(); ++i)
    if (entries_[static_cast<std::size_t>(i)]) out.emplace_back(i + 1);
  return out;
}

int InputConfiguration::count() const {
  return static_cast<int>(std::count_if(entries_.begin(), entries_.end(), [](const auto& e) { return e.has_value(); }));
}

Value InputConfiguration::as_value() const {
  Value v;
  for (const auto& e : entries_) {
    if (!e) throw std::logic_error("configuration is not full");
    v.push_back(*e);
  }
  return v;
}

std::string to_string(const InputConfiguration& c) {
  std::string s = "[";
  for (int i = 0; i < c.n(); ++i) {
    if (i) s += ",";
    const auto& e = c.entries()[static_cast<std::size_t>(i)];
    s += e ? std::to_string(*e) : "_";
  }
  return s + "]";
}

bool contains(const InputConfiguration& c1, const InputConfiguration& c2) {
  if (c1.n() != c2.n()) return false;
  for (std::size_t i = 0; i < c2.entries().size(); ++i)
    if (c2.entries()[i] && c1.entries()[i] != c2.entries()[i]) return false;
  return true;
}

bool is_member(const InputConfiguration& c, const ValueContext& ctx) {
  if (c.n() != ctx.n || c.count() < ctx.n - ctx.t) return false;
  for (const auto& e : c.entries())
    if (e && !std::binary_search(ctx.inputs.begin(), ctx.inputs.end(), *e)) return false;
  return true;
}

std::uint64_t configuration_count(const ValueContext& ctx) {
  std::uint64_t total = 0;
  for (int k = std::max(0, ctx.n - ctx.t); k <= ctx.n; ++k)
    total = sat_add(total, sat_mul(binomial(ctx.n, k), sat_pow(ctx.inputs.size(), k)));
  return total;
}

std::uint64_t containment_count(const InputConfiguration& c, const ValueContext& ctx) {
  int q = c.count();
  std::uint64_t total = 0;
  for (int k = std::max(0, ctx.n - ctx.t); k <= q; ++k) total = sat_add(total, binomial(q, k));
  return total;
}

std::vector<InputConfiguration> enumerate_configurations(const ValueContext& ctx) {
  require_bound(configuration_count(ctx), "the configuration space");
  std::vector<InputConfiguration> out;
  for_each_superset(InputConfiguration(std::vector<std::optional<std::int64_t>>(static_cast<std::size_t>(ctx.n))), ctx,
                    [&](InputConfiguration c) { out.push_back(std::move(c)); });
  return out;
}

std::vector<InputConfiguration> containment_set(const InputConfiguration& c, const ValueContext& ctx) {
  if (!is_member(c, ctx)) throw std::invalid_argument("configuration " + to_string(c) + " is not in the context");
  require_bound(containment_count(c, ctx), "the containment set of " + to_string(c));
  std::vector<InputConfiguration> out;
  auto present = c.processes();
  int q = static_cast<int>(present.size());
  int min_k = ctx.n - ctx.t;
  // Subsets of the present processes, as keep/drop masks.
  std::vector<std::optional<std::int64_t>> entries(static_cast<std::size_t>(ctx.n));
  auto rec = [&](auto&& self, int i, int kept) -> void {
    if (i == q) {
      if (kept >= min_k) out.emplace_back(entries);
      return;
    }
    auto idx = static_cast<std::size_t>(present[static_cast<std::size_t>(i)].index - 1);
    entries[idx] = std::nullopt;
    if (kept + (q - i - 1) >= min_k) self(self, i + 1, kept);
    entries[idx] = c.entries()[idx];
    self(self, i + 1, kept + 1);
    entries[idx] = std::nullopt;
  };
  rec(rec, 0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

ValidityProperty::ValidityProperty(std::string name, ValueContext ctx, std::vector<Value> outputs, ValueSet fallback,
                                   std::map<InputConfiguration, ValueSet> overrides)
    : name_(std::move(name)),
      ctx_(std::move(ctx)),
      outputs_(std::move(outputs)),
      fallback_(std::move(fallback)),
      overrides_(std::move(overrides)) {
  std::sort(ctx_.inputs.begin(), ctx_.inputs.end());
  ctx_.inputs.erase(std::unique(ctx_.inputs.begin(), ctx_.inputs.end()), ctx_.inputs.end());
  if (ctx_.n < 1 || ctx_.t < 0 || ctx_.t >= ctx_.n) throw PropertyError("need 0 <= t < n");
  if (ctx_.inputs.empty()) throw PropertyError("input domain is empty");
  if (outputs_.empty()) throw PropertyError("output domain is empty");
  std::sort(outputs_.begin(), outputs_.end());
  outputs_.erase(std::unique(outputs_.begin(), outputs_.end()), outputs_.end());
  auto known = [&](const Value& v) { return std::binary_search(outputs_.begin(), outputs_.end(), v); };
  for (const auto& v : fallback_)
    if (!known(v)) throw PropertyError("default admissible value " + to_string(v) + " is not an output");
  for (const auto& [c, set] : overrides_) {
    if (!is_member(c, ctx_)) throw PropertyError("override " + to_string(c) + " is not an input configuration");
    if (set.empty()) throw PropertyError("override " + to_string(c) + " admits no value");
    for (const auto& v : set)
      if (!known(v)) throw PropertyError("admissible value " + to_string(v) + " is not an output");
  }
  if (fallback_.empty() && !every_configuration_overridden())
    throw PropertyError("default admissible set is empty but some configurations use it");
}

const ValueSet& ValidityProperty::admissible(const InputConfiguration& c) const {
  auto it = overrides_.find(c);
  return it == overrides_.end() ? fallback_ : it->second;
}

bool ValidityProperty::every_configuration_overridden() const {
  return configuration_count(ctx_) == overrides_.size();
}

namespace {

ValueSet scalar_outputs(const ValueContext& ctx) {
  ValueSet out;
  for (auto v : ctx.inputs) out.insert(scalar(v));
  return out;
}

std::vector<Value> as_vector(const ValueSet& s) { return {s.begin(), s.end()}; }

ValueSet intersect(const ValueSet& a, const ValueSet& b) {
  ValueSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

}  // namespace

PropertyRef weak_validity(const ValueContext& ctx) {
  auto outs = scalar_outputs(ctx);
  std::map<InputConfiguration, ValueSet> overrides;
  for (auto v : ctx.inputs)
    overrides[InputConfiguration::full(std::vector<std::int64_t>(static_cast<std::size_t>(ctx.n), v))] = {scalar(v)};
  return std::make_shared<ValidityProperty>("weak", ctx, as_vector(outs), outs, std::move(overrides));
}

PropertyRef strong_validity(const ValueContext& ctx) {
  std::uint64_t count = 0;
  for (int k = std::max(0, ctx.n - ctx.t); k <= ctx.n; ++k)
    count = sat_add(count, sat_mul(binomial(ctx.n, k), ctx.inputs.size()));
  require_bound(count, "strong validity's unanimous configurations");
  auto outs = scalar_outputs(ctx);
  std::map<InputConfiguration, ValueSet> overrides;
  for (auto v : ctx.inputs) {
    ValueContext single{ctx.n, ctx.t, {v}};
    for_each_superset(InputConfiguration(std::vector<std::optional<std::int64_t>>(static_cast<std::size_t>(ctx.n))),
                      single, [&](InputConfiguration c) { overrides[std::move(c)] = {scalar(v)}; });
  }
  return std::make_shared<ValidityProperty>("strong", ctx, as_vector(outs), outs, std::move(overrides));
}

PropertyRef ic_validity(const ValueContext& ctx) {
  require_bound(sat_mul(configuration_count(ctx), sat_pow(ctx.inputs.size(), ctx.t)),
                "interactive consistency's admissible sets");
  std::vector<Value> outputs;
  ValueContext fulls{ctx.n, 0, ctx.inputs};
  for (const auto& c : enumerate_configurations(fulls)) outputs.push_back(c.as_value());
  std::map<InputConfiguration, ValueSet> overrides;
  for (const auto& c : enumerate_configurations(ctx)) {
    ValueSet set;
    for_each_superset(c, fulls, [&](const InputConfiguration& full) { set.insert(full.as_value()); });
    overrides[c] = std::move(set);
  }
  ValueSet all(outputs.begin(), outputs.end());
  return std::make_shared<ValidityProperty>("ic", ctx, std::move(outputs), std::move(all), std::move(overrides));
}

PropertyRef any_value_validity(const ValueContext& ctx) {
  auto outs = scalar_outputs(ctx);
  return std::make_shared<ValidityProperty>("any", ctx, as_vector(outs), outs, std::map<InputConfiguration, ValueSet>{});
}

PropertyRef builtin_property(const std::string& name, const ValueContext& ctx) {
  if (name == "weak") return weak_validity(ctx);
  if (name == "strong") return strong_validity(ctx);
  if (name == "ic") return ic_validity(ctx);
  if (name == "any") return any_value_validity(ctx);
  throw PropertyError("unknown built-in property '" + name + "' (expected weak, strong, ic or any)");
}

ValueSet common_admissible(const ValidityProperty& v, const InputConfiguration& c) {
  std::uint64_t contained_overrides = 0;
  std::optional<ValueSet> acc;
  for (const auto& [o, set] : v.overrides()) {
    if (!contains(c, o)) continue;
    ++contained_overrides;
    acc = acc ? intersect(*acc, set) : set;
  }
  if (containment_count(c, v.context()) > contained_overrides) acc = acc ? intersect(*acc, v.fallback()) : v.fallback();
  if (!acc) return ValueSet(v.outputs().begin(), v.outputs().end());
  return *acc;
}

GammaTable GammaTable::tabulated(std::map<InputConfiguration, Value> table) {
  GammaTable g;
  g.table_ = std::move(table);
  return g;
}

GammaTable GammaTable::lazy(PropertyRef property) {
  GammaTable g;
  g.property_ = std::move(property);
  return g;
}

Value GammaTable::select(const InputConfiguration& c) const {
  if (!property_) {
    auto it = table_.find(c);
    if (it == table_.end()) throw std::out_of_range("no decision for configuration " + to_string(c));
    return it->second;
  }
  if (!is_member(c, property_->context()))
    throw std::out_of_range("configuration " + to_string(c) + " is not in the context");
  auto s = common_admissible(*property_, c);
  if (s.empty()) throw std::logic_error("no value is admissible for every configuration in " + to_string(c));
  return *s.begin();
}

namespace {

CcWitness explain(const ValidityProperty& v, const InputConfiguration& c) {
  std::vector<InputConfiguration> members;
  for (const auto& [o, set] : v.overrides())
    if (contains(c, o)) members.push_back(o);
  if (containment_count(c, v.context()) > members.size() && containment_count(c, v.context()) <= kEnumerationBound)
    for (const auto& m : containment_set(c, v.context()))
      if (!v.overrides().contains(m)) {
        members.push_back(m);
        break;
      }
  std::sort(members.begin(), members.end());
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      if (intersect(v.admissible(members[i]), v.admissible(members[j])).empty())
        return CcWitness{c, {members[i], members[j]}};
  return CcWitness{c, members};
}

}  // namespace

CcResult check_cc(PropertyRef v) {
  CcResult out;
  const auto& ctx = v->context();
  if (configuration_count(ctx) <= kEnumerationBound) {
    std::map<InputConfiguration, Value> table;
    for (const auto& c : enumerate_configurations(ctx)) {
      auto s = common_admissible(*v, c);
      if (s.empty()) {
        out.witness = explain(*v, c);
        return out;
      }
      table.emplace(c, *s.begin());
    }
    out.holds = true;
    out.gamma = GammaTable::tabulated(std::move(table));
    return out;
  }
  // Only configurations containing an override can have an empty intersection.
  std::uint64_t candidates = 0;
  for (const auto& [o, set] : v->overrides())
    candidates = sat_add(candidates, sat_pow(ctx.inputs.size() + 1, ctx.n - o.count()));
  require_bound(candidates, "the set of configurations containing an override");
  std::set<InputConfiguration> seen;
  for (const auto& [o, set] : v->overrides())
    for_each_superset(o, ctx, [&](InputConfiguration c) { seen.insert(std::move(c)); });
  for (const auto& c : seen)
    if (common_admissible(*v, c).empty()) {
      out.witness = explain(*v, c);
      return out;
    }
  out.holds = true;
  out.gamma = GammaTable::lazy(v);
  return out;
}

TrivialityResult check_trivial(const ValidityProperty& v) {
  ValueSet acc = v.every_configuration_overridden() ? ValueSet(v.outputs().begin(), v.outputs().end()) : v.fallback();
  for (const auto& [c, set] : v.overrides()) acc = intersect(acc, set);
  TrivialityResult out;
  out.trivial = !acc.empty();
  if (out.trivial) out.witness = *acc.begin();
  return out;
}

std::string to_string(Solvability s) {
  switch (s) {
    case Solvability::trivial: return "trivial";
    case Solvability::solvable: return "solvable";
    case Solvability::unsolvable_cc: return "unsolvable-CC";
    case Solvability::unsolvable_resilience: return "unsolvable-resilience";
  }
  return "?";
}

Classification classify_solvability(PropertyRef v, bool authenticated) {
  Classification out;
  out.triviality = check_trivial(*v);
  if (out.triviality.trivial) {
    out.verdict = Solvability::trivial;
    out.cc.holds = true;
    out.cc.gamma = GammaTable::lazy(v);
    return out;
  }
  out.cc = check_cc(v);
  if (!out.cc.holds)
    out.verdict = Solvability::unsolvable_cc;
  else if (!authenticated && v->context().n <= 3 * v->context().t)
    out.verdict = Solvability::unsolvable_resilience;
  else
    out.verdict = Solvability::solvable;
  return out;
}

}  // namespace roundsim
