// Runs the full acceptance suite; one line per criterion, nonzero exit on
// any failure.

#include <cstdlib>
#include <iostream>

#include "dsdm/acceptance.hpp"

int main() {
  bool ok = true;
  for (const auto& r : dsdm::run_acceptance(dsdm::Setup{})) {
    std::cout << dsdm::format_result(r) << '\n';
    ok = ok && r.passed;
  }
  std::cout << (ok ? "all criteria passed" : "FAILED") << std::endl;
  return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
