#include "csmpd/cli.hpp"

int main(int argc, char** argv) { return csmpd::run_cli(argc, argv); }
