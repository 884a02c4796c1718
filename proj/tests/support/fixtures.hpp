#pragma once

#include <random>
#include <vector>

#include "roundsim/engine.hpp"

namespace fixtures {

constexpr std::uint64_t kSeed = 0x5eed2024;

std::vector<std::int64_t> random_bits(std::mt19937_64& rng, int n);

// Random omission faults: a faulty set of size <= t, random send and receive
// omissions by faulty processes and, sometimes, one isolated group.
roundsim::AdversarySchedule random_omission_schedule(std::mt19937_64& rng, int n, int t, int horizon,
                                                     bool allow_isolation = true);

// Same, but `keep_clean` never send-omits.
roundsim::AdversarySchedule random_receive_heavy_schedule(std::mt19937_64& rng, int n, int t, int horizon,
                                                          roundsim::ProcessId keep_clean);

int uniform(std::mt19937_64& rng, int lo, int hi);

}  // namespace fixtures
