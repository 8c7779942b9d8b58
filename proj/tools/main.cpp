#include <vector>
#include <string>

#include "sae/experiment.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sae::cli_main(args);
}
