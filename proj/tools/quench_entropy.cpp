#include "qe/cli/commands.hpp"

int main(int argc, char** argv) { return qe::cli::run(argc, argv); }
