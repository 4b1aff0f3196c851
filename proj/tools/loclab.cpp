#include "loclab/cli.hpp"

int main(int argc, char** argv) { return loclab::cli::run_cli(argc, argv); }
