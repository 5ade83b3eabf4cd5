// Acceptance harness: runs the end-to-end checks and prints one PASS/FAIL
// line per criterion. Exit status is the number of failed criteria.

#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "specshare/acceptance.hpp"

int main(int argc, char** argv) {
  specshare::ExperimentConfig cfg;
  std::vector<std::string> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only.emplace_back(argv[++i]);
    } else if (arg == "--config" && i + 1 < argc) {
      std::ifstream in(argv[++i]);
      if (!in) {
        std::cerr << "cannot open config file\n";
        return 64;
      }
      cfg = specshare::parse_config(in);
    } else if (arg == "--list") {
      for (const auto& name : specshare::acceptance::criterion_names())
        std::cout << name << '\n';
      return 0;
    } else {
      std::cerr << "usage: acceptance_suite [--config <path>] [--criterion <name>]... [--list]\n";
      return 64;
    }
  }
  return specshare::acceptance::run(cfg, only, std::cout);
}
