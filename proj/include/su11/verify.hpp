#pragma once

#include <string>
#include <vector>

namespace su11 {

enum class VerifyLevel { fast, full };

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::full;
  std::vector<int> only;  // empty: all nine criteria
  int threads = 0;        // 0: SU11_THREADS or hardware concurrency
};

// Runs the acceptance criteria. Exceptions inside a criterion count as a
// failure of that criterion.
std::vector<CriterionResult> run_verify(const VerifyOptions& opt);

// One line, `PASS|FAIL <id> <name> measured=<v> tolerance=<v> time=<s> | detail`.
std::string format_result(const CriterionResult& r);

}  // namespace su11
