#include "darpdp/cli.hpp"

int main(int argc, char** argv) { return darpdp::run_cli(argc, argv); }
