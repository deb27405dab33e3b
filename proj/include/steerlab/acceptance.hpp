#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "steerlab/bundle.hpp"

namespace steer::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  std::uint64_t seed = 0;
  std::vector<int> only;  // empty: all criteria 1-11
};

/// The property suite that gates a release; identical for `steer verify`
/// and the acceptance test binary.
std::vector<CriterionResult> run(const Options& options = {});

/// Invariant checks on a user bundle: validation, closed-form residuals and
/// principal bases for every level.
std::vector<CriterionResult> check_bundle(const WeightBundle& bundle);

/// "PASS  3  refinement composition ... (0.01 s)" per result.
void print(std::ostream& out, const std::vector<CriterionResult>& results);
std::string to_json(const std::vector<CriterionResult>& results);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace steer::acceptance
