#include <iostream>

#include "fmn/cli.hpp"
#include "fmn/service.hpp"

int main(int argc, char** argv) {
  auto serve = [](const std::string& bind, int port, bool cors_dev, std::ostream& err) {
    return fmn::serve({bind, port, cors_dev}, err);
  };
  return fmn::run_cli(argc, argv, std::cout, std::cerr, serve);
}
