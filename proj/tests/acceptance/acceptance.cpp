// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <iostream>

#include "rym/acceptance.hpp"

int main() {
  const auto results = rym::run_acceptance();
  int failed = 0;
  for (const auto& r : results) {
    std::cout << rym::format_result(r) << std::endl;
    if (!r.passed) ++failed;
  }
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed"
            << std::endl;
  return failed ? 1 : 0;
}
