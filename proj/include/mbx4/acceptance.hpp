#pragma once

// Desk-scale acceptance suite. Each criterion runs its own experiments and
// reports a list of named checks; a criterion passes when every
// non-informational check passes, including its wall-clock budget.

#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mbx4::acceptance {

// Deliberate defects used to prove that the suite can fail.
enum class Fault { none, kappa };

Fault parse_fault(std::string_view name);

struct Options {
  Fault fault = Fault::none;
  int threads = 0;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
  bool informational = false;  // reported, never fails the criterion
};

struct Report {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;
  std::string error;  // exception text when the criterion could not complete

  bool passed() const;
};

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<std::vector<Check>(const Options&)> run;
};

const std::vector<Criterion>& criteria();

Report run_criterion(const Criterion& criterion, const Options& options);

/// Runs the selected criteria (all when `only` is empty), printing one
/// PASS/FAIL line per criterion followed by its checks.
std::vector<Report> run_suite(std::span<const int> only, const Options& options, std::ostream& out);

void print_report(const Report& report, std::ostream& out);

}  // namespace mbx4::acceptance
