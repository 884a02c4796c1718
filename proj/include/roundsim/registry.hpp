#pragma once

#include <string>
#include <vector>

#include "roundsim/algorithm.hpp"
#include "roundsim/engine.hpp"

namespace roundsim {

class UnknownAlgorithm : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Ids: silent-default, star-leader, flood-echo-<k>, own-proposal, ds-ic,
// reference-weak, agreement-via-ic:<builtin property>.
AlgorithmRef make_algorithm(const std::string& id, int n, int t);
std::vector<std::string> algorithm_ids();

// Binds the behaviors named in schedule.byzantine.
RunOptions options_for(const AdversarySchedule& schedule);

}  // namespace roundsim
