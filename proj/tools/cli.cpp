#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "sbpglue/blas_env.hpp"

int main(int argc, char** argv) {
  sbpglue::pin_openblas_core(argv);
  std::vector<std::string> args(argv + 1, argv + argc);
  return sbpglue::cli::run_cli(args, std::cout, std::cerr);
}
