#include "aquactl/cli.hpp"

int main(int argc, char** argv) { return aquactl::cli_main(argc, argv); }
