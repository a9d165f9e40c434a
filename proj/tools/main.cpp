#include "pv/cli.hpp"

int main(int argc, char** argv) { return pv::run_cli(argc, argv); }
