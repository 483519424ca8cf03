#include "pcrit/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return pcrit::cli::dispatch(argc, argv, std::cout, std::cerr); }
