#pragma once

namespace roundsim {

// Exit codes: 0 success, 1 a violation or failed check, 2 malformed input,
// 3 the falsifier reached an inconsistent state.
int run_cli(int argc, char** argv);

}  // namespace roundsim
