#include "repairkit/cli.hpp"

int main(int argc, char **argv) { return repairkit::cli::run(argc, argv); }
