#include "cli.hpp"

int main(int argc, char** argv) { return bellcost::cli::run(argc, argv); }
