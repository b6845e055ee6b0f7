#include <cstdlib>
#include <cstring>
#include <iostream>

#include "su11/verify.hpp"

// Usage: acceptance [--fast] [criterion ids...]
int main(int argc, char** argv) {
  su11::VerifyOptions opt;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--fast") == 0)
      opt.level = su11::VerifyLevel::fast;
    else
      opt.only.push_back(std::atoi(argv[i]));
  }
  bool all = true;
  for (const auto& r : su11::run_verify(opt)) {
    std::cout << su11::format_result(r) << '\n' << std::flush;
    all = all && r.passed;
  }
  return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
