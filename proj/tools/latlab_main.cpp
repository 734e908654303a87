// CLI entry point; subcommand dispatch lives in latlab/cli.hpp.

#include "latlab/cli.hpp"

int main(int argc, char** argv) { return latlab::cli::run(argc, argv); }
