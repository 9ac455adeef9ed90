/// @file acceptance.hpp
/// @brief The nine acceptance criteria as one runnable suite.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rym {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;  ///< measured values behind the verdict
  double seconds = 0.0;
  double time_limit = 0.0;
};

/// Runs criteria 1-9. Criteria 5 and 8 audit the trajectories produced by the
/// others, so they run last; results come back ordered by id. Progress lines
/// go to `log` when given.
std::vector<CriterionResult> run_acceptance(std::ostream* log = nullptr);

/// "PASS criterion 3 (title): detail [1.2 s / 5 s]"
std::string format_result(const CriterionResult& r);

}  // namespace rym
