#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace relayqkd::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Criterion {
  int id;
  std::string name;
  std::function<CriterionResult()> check;
};

/// The exit criteria, in order. Each check is self-contained and seeded.
std::vector<Criterion> criteria();

/// Runs every criterion, printing one "PASS"/"FAIL" line per criterion to
/// `os`. Returns true when all passed.
bool run_all(std::ostream& os);

}  // namespace relayqkd::acceptance
