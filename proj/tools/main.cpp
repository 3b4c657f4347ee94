#include "pmtop/cli.hpp"

int main(int argc, char** argv) { return pmtop::run_cli(argc, argv); }
