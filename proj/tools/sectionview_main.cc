#include <iostream>

#include "sectionview/cli.h"

int main(int argc, char** argv) {
  return sectionview::run_cli(argc, argv, std::cout, std::cerr);
}
