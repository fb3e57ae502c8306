#include <iostream>

#include "chirplock/cli.hpp"

int main(int argc, char** argv) { return chirplock::cli::run(argc, argv, std::cout, std::cerr); }
