#include "hnncp/cli.hpp"

int main(int argc, char** argv) { return hnncp::cli::run(argc, argv, std::cout, std::cerr); }
