#include "polyclt/cli.hpp"

int main(int argc, char** argv) { return polyclt::cli::run(argc, argv); }
