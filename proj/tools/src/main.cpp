#include <iostream>

#include "neutroseg_app/cli.hpp"

int main(int argc, char** argv) { return neutroseg::app::run(argc, argv, std::cout, std::cerr); }
