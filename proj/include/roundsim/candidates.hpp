#pragma once

#include "roundsim/algorithm.hpp"

namespace roundsim {

// Sends nothing and decides 1 immediately.
AlgorithmRef silent_default();

// Everyone reports to p1 in round 1; p1 decides 0 iff it heard 0 from all,
// else 1, and announces that in round 2. Others adopt the announcement, or
// default to 1 when it is missing.
AlgorithmRef star_leader();

// k rounds of all-to-all view exchange; after round k decide 0 iff the view
// is complete and all zero, else 1.
AlgorithmRef flood_echo(int rounds);

// Decides its own proposal immediately without communicating.
AlgorithmRef own_proposal();

}  // namespace roundsim
