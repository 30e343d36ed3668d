#include "cli.hpp"

int main(int argc, char** argv) { return wirefield::cli::run(argc, argv); }
