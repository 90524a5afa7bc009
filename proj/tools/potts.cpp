#include <iostream>

#include "potts/harness.hpp"

int main(int argc, char** argv) { return potts::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
