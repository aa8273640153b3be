#include <string>
#include <vector>

#include "dolfe/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dolfe::cli::run(std::move(args));
}
