#include "godec/cli.hpp"

int main(int argc, char** argv) { return godec::run_cli(argc, argv); }
