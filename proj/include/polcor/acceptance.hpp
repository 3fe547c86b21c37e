#pragma once
#include <iosfwd>
#include <string>
#include <vector>

namespace polcor::acceptance {

struct CriterionResult {
  int number;
  std::string name;
  bool passed;
  std::string detail;
  double seconds;
};

/// Runs every acceptance criterion, printing one PASS/FAIL line per
/// criterion to `log` as it goes.
std::vector<CriterionResult> run_all(std::ostream& log);

/// Convenience wrapper: 0 when everything passed, 1 otherwise.
int run_cli(std::ostream& log);

}  // namespace polcor::acceptance
