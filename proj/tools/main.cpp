#include <iostream>

#include "qdecouple/cli.hpp"

int main(int argc, char** argv) { return qdecouple::cli::run(argc, argv, std::cout, std::cerr); }
