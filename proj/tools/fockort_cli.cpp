#include "fockort/app.hpp"

#include <iostream>

int main(int argc, char** argv) { return fockort::app::run_cli(argc, argv, std::cout, std::cerr); }
