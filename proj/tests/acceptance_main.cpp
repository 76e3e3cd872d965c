// Acceptance gate: one PASS/FAIL line per criterion.
//   acceptance                 all criteria
//   acceptance --criterion 7   just one

#include <cstdlib>
#include <cstring>
#include <iostream>

#include "percodyn/acceptance.hpp"

int main(int argc, char** argv) {
  using namespace percodyn::acceptance;
  int first = 1, last = kCriteria;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      first = last = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--criterion k]\n";
      return 2;
    }
  }
  bool ok = true;
  for (int k = first; k <= last; ++k) {
    try {
      const CriterionResult r = run_criterion(k);
      std::cout << format_line(r) << std::endl;
      ok = ok && r.passed;
    } catch (const std::exception& e) {
      std::cout << "[FAIL] " << k << "  " << title(k) << "  error: " << e.what() << std::endl;
      ok = false;
    }
  }
  return ok ? 0 : 1;
}
