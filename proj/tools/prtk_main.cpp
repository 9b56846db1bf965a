#include "prtk/cli.hpp"

int main(int argc, char** argv) { return prtk::cli::run_cli(argc, argv); }
