#include <iostream>

#include "qpd/cli/app.hpp"

int main(int argc, char** argv) {
  return qpd::cli::run_cli(argc, argv, qpd::cli::process_environment(), std::cout, std::cerr);
}
