#include <iostream>

#include "dbm/cli.hpp"

int main(int argc, char** argv) { return dbm::cli::run(argc, argv, std::cout, std::cerr); }
