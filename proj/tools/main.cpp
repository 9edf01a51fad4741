#include <string>
#include <vector>

#include "iscore/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return iscore::cli::dispatch(args);
}
