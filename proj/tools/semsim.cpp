#include "sem/cli/commands.hpp"

int main(int argc, char** argv) { return sem::cli::run_main(argc, argv); }
