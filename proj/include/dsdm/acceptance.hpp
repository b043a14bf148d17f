#pragma once

// Acceptance suite: analytical oracles plus scenario assertions, one
// verdict per numbered criterion. Shared by `dsdm check` and the
// acceptance test binary.

#include <string>
#include <vector>

#include "dsdm/config.hpp"

namespace dsdm {

struct CriterionResult {
  std::string id;  // "1".."12" for the numbered criteria, "S:<name>" for scenario checks
  std::string title;
  bool passed = false;
  std::string detail;
};

/// Runs every criterion. Scenarios run on up to `workers` threads
/// (0 picks the hardware concurrency).
std::vector<CriterionResult> run_acceptance(const Setup& setup, unsigned workers = 0);

std::string format_result(const CriterionResult& r);

}  // namespace dsdm
