#pragma once

// Brute-force oracles over small validity contexts and adversary samplers
// shared by the unit tests and the acceptance gate.

#include <map>
#include <random>
#include <vector>

#include "roundsim/engine.hpp"
#include "roundsim/validity.hpp"

namespace oracle {

// Every configuration with at least n - t entries, by ternary counting.
std::vector<roundsim::InputConfiguration> all_configs(int n, int t);

bool contains(const roundsim::InputConfiguration& a, const roundsim::InputConfiguration& b);

// Intersection of val(c') over every c' contained in c, by enumerating the
// subsets of c's processes.
roundsim::ValueSet common(const roundsim::ValidityProperty& v, const roundsim::InputConfiguration& c);

struct CcTable {
  bool holds = true;
  std::map<roundsim::InputConfiguration, roundsim::ValueSet> common;
};

CcTable cc_table(const roundsim::ValidityProperty& v);

// Correct processes' proposals, faulty entries absent.
roundsim::InputConfiguration realized(const roundsim::Execution& e, std::span<const std::int64_t> proposals);

// Every correct process decided, all agree, and the decision lies in
// common(v, realized). Returns a description of the first problem, or "".
std::string check_decisions(const roundsim::Execution& e, std::span<const std::int64_t> proposals,
                            const roundsim::ValidityProperty& v);

struct Adversary {
  roundsim::AdversarySchedule schedule;
  roundsim::RunOptions options;
};

// Up to t Byzantine processes drawn from the shipped menu; rushing at random.
Adversary random_byzantine(std::mt19937_64& rng, int n, int t);

}  // namespace oracle
