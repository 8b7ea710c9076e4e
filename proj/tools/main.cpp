#include <string>
#include <vector>

#include "frele/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return frele::dispatch(args);
}
