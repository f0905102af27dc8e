#include "repscore/cli.hpp"

int main(int argc, char** argv) { return repscore::cli::run(argc, argv); }
