#include "powl/cli.hpp"

int main(int argc, char** argv) { return wfpowl::cli_main(argc, argv); }
