#include "cortex/cli.hpp"

int main(int argc, char** argv) { return cortex::cli::run(argc, argv); }
