#include <string>
#include <vector>

#include "dtpca/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dtpca::cli::run(args);
}
