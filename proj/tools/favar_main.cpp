#include "favar/cli/commands.hpp"

int main(int argc, char** argv) { return favar::cli::run_cli(argc, argv); }
