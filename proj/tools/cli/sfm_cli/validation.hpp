#pragma once

// Acceptance criteria 1-12, shared by `sfm validate` and the acceptance test.

#include <optional>
#include <string>
#include <vector>

namespace sfm::cli {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;  // measured values against tolerances
};

struct ValidationOptions {
  /// Multiplies the trace constant in every forward solve (debug).
  double c_scale = 1.0;
};

enum class Suite { disk, kite, screen, all };

std::optional<Suite> parse_suite(const std::string& name);
std::vector<int> suite_criteria(Suite suite);

/// Throws std::out_of_range for ids outside 1..12.
CriterionResult run_criterion(int id, const ValidationOptions& opts = {});

/// "[PASS] 1 forward accuracy (disk oracle): ..."
std::string format_result(const CriterionResult& r);

}  // namespace sfm::cli
