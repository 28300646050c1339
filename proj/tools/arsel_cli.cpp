#include "arsel/harness/cli.hpp"

int main(int argc, char** argv) { return arsel::harness::run_cli(argc, argv); }
