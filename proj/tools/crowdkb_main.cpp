#include "crowdkb/cli.hpp"

int main(int argc, char** argv) { return crowdkb::run_cli(argc, argv); }
