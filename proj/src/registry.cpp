#include "roundsim/registry.hpp"

#include "roundsim/candidates.hpp"
#include "roundsim/reductions.hpp"

namespace roundsim {

AlgorithmRef make_algorithm(const std::string& id, int n, int t) {
  if (id == "silent-default") return silent_default();
  if (id == "star-leader") return star_leader();
  if (id == "own-proposal") return own_proposal();
  if (id == "ds-ic") return interactive_consistency(n, t);
  if (id == "reference-weak" || id == "weak-from(agreement-via-ic(weak))") return reference_weak_consensus(n, t);
  const std::string flood = "flood-echo-";
  if (id.rfind(flood, 0) == 0) {
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(id.substr(flood.size()), &used);
    } catch (const std::exception&) {
      throw UnknownAlgorithm("bad round count in '" + id + "'");
    }
    if (used != id.size() - flood.size() || k < 1) throw UnknownAlgorithm("bad round count in '" + id + "'");
    return flood_echo(k);
  }
  for (const std::string prefix : {"agreement-via-ic:", "agreement-via-ic("}) {
    if (id.rfind(prefix, 0) != 0) continue;
    auto name = id.substr(prefix.size());
    if (prefix.back() == '(') {
      if (name.empty() || name.back() != ')') break;
      name.pop_back();
    }
    return val_agreement_from_ic(builtin_property(name, binary_context(n, t)));
  }
  throw UnknownAlgorithm("unknown algorithm '" + id + "'");
}

std::vector<std::string> algorithm_ids() {
  return {"silent-default", "star-leader", "flood-echo-<k>", "own-proposal", "ds-ic", "reference-weak",
          "agreement-via-ic:<weak|strong|ic|any>"};
}

RunOptions options_for(const AdversarySchedule& schedule) {
  RunOptions opts;
  for (const auto& [p, id] : schedule.byzantine) opts.byzantine[p] = byzantine_behavior(id);
  return opts;
}

}  // namespace roundsim
