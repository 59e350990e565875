#pragma once

#include <functional>
#include <string>
#include <vector>

namespace lrp {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  unsigned workers = 1;
  std::vector<int> only;  ///< empty: all nine criteria
};

/// Runs the acceptance criteria at full scale. `on_result` is called as each finishes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// One line: "[PASS] 3 containment theorem: ...".
std::string format_result(const CriterionResult& r);

}  // namespace lrp
