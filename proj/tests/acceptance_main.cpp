// Acceptance runner used by ctest: criterion numbers on the command line,
// one PASS/FAIL line per criterion, nonzero exit when any criterion fails.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "mbx4/acceptance.hpp"

int main(int argc, char** argv) {
  using namespace mbx4::acceptance;
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<Report> reports = run_suite(only, Options{}, std::cout);
  for (const Report& r : reports) {
    if (!r.passed()) return 1;
  }
  return 0;
}
