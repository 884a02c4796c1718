#include "roundsim/cli.hpp"

int main(int argc, char** argv) { return roundsim::run_cli(argc, argv); }
