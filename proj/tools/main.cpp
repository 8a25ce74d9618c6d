#include <iostream>

#include "tcprep/cli.hpp"

int main(int argc, char** argv) { return tcprep::run_cli(argc, argv, std::cerr); }
