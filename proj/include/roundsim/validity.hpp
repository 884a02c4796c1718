#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "roundsim/types.hpp"

namespace roundsim {

struct ValueContext {
  int n = 0;
  int t = 0;
  std::vector<std::int64_t> inputs;  // V_I, sorted and distinct
};

ValueContext binary_context(int n, int t);

// Partial assignment of proposals to processes; absent entries order first.
class InputConfiguration {
 public:
  InputConfiguration() = default;
  explicit InputConfiguration(std::vector<std::optional<std::int64_t>> entries);
  static InputConfiguration full(const std::vector<std::int64_t>& proposals);

  int n() const { return static_cast<int>(entries_.size()); }
  const std::optional<std::int64_t>& at(ProcessId p) const;
  std::vector<ProcessId> processes() const;
  int count() const;
  const std::vector<std::optional<std::int64_t>>& entries() const { return entries_; }
  Value as_value() const;  // only for full configurations

  friend auto operator<=>(const InputConfiguration&, const InputConfiguration&) = default;
  friend bool operator==(const InputConfiguration&, const InputConfiguration&) = default;

 private:
  std::vector<std::optional<std::int64_t>> entries_;
};

std::string to_string(const InputConfiguration& c);

// c1 contains c2: c1 covers every process of c2 with the same proposal.
bool contains(const InputConfiguration& c1, const InputConfiguration& c2);

bool is_member(const InputConfiguration& c, const ValueContext& ctx);

class EnumerationBoundExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kEnumerationBound = 10'000'000;

// Saturating counts.
std::uint64_t configuration_count(const ValueContext& ctx);
std::uint64_t containment_count(const InputConfiguration& c, const ValueContext& ctx);

std::vector<InputConfiguration> enumerate_configurations(const ValueContext& ctx);
std::vector<InputConfiguration> containment_set(const InputConfiguration& c, const ValueContext& ctx);

using ValueSet = std::set<Value>;

// val(c) stored as a default admissible set plus explicit overrides.
class ValidityProperty {
 public:
  ValidityProperty(std::string name, ValueContext ctx, std::vector<Value> outputs, ValueSet fallback,
                   std::map<InputConfiguration, ValueSet> overrides);

  const std::string& name() const { return name_; }
  const ValueContext& context() const { return ctx_; }
  const std::vector<Value>& outputs() const { return outputs_; }
  const ValueSet& fallback() const { return fallback_; }
  const std::map<InputConfiguration, ValueSet>& overrides() const { return overrides_; }

  const ValueSet& admissible(const InputConfiguration& c) const;
  bool every_configuration_overridden() const;

 private:
  std::string name_;
  ValueContext ctx_;
  std::vector<Value> outputs_;
  ValueSet fallback_;
  std::map<InputConfiguration, ValueSet> overrides_;
};

using PropertyRef = std::shared_ptr<const ValidityProperty>;

class PropertyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Only unanimous full configurations are constrained.
PropertyRef weak_validity(const ValueContext& ctx);
// Every unanimous configuration is constrained.
PropertyRef strong_validity(const ValueContext& ctx);
// Decide a full vector that agrees with every proposal present.
PropertyRef ic_validity(const ValueContext& ctx);
// Every output always admissible.
PropertyRef any_value_validity(const ValueContext& ctx);
PropertyRef builtin_property(const std::string& name, const ValueContext& ctx);

// Intersection of val over every configuration contained in c.
ValueSet common_admissible(const ValidityProperty& v, const InputConfiguration& c);

class GammaTable {
 public:
  static GammaTable tabulated(std::map<InputConfiguration, Value> table);
  static GammaTable lazy(PropertyRef property);

  Value select(const InputConfiguration& c) const;
  bool is_tabulated() const { return !property_; }
  const std::map<InputConfiguration, Value>& table() const { return table_; }

 private:
  std::map<InputConfiguration, Value> table_;
  PropertyRef property_;
};

struct CcWitness {
  InputConfiguration config;
  std::vector<InputConfiguration> conflicting;  // contained configurations with empty common intersection
};

struct CcResult {
  bool holds = false;
  std::optional<GammaTable> gamma;
  std::optional<CcWitness> witness;
};

CcResult check_cc(PropertyRef v);

struct TrivialityResult {
  bool trivial = false;
  std::optional<Value> witness;
};

TrivialityResult check_trivial(const ValidityProperty& v);

enum class Solvability { trivial, solvable, unsolvable_cc, unsolvable_resilience };
std::string to_string(Solvability s);

struct Classification {
  Solvability verdict = Solvability::unsolvable_cc;
  TrivialityResult triviality;
  CcResult cc;
};

Classification classify_solvability(PropertyRef v, bool authenticated);

}  // namespace roundsim
