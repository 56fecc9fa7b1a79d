#pragma once

#include <string>
#include <vector>

namespace zovr {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Named invariant suites behind the `verify` subcommand. Suites:
///   estimators - bias, exactness, sphere-sampling and query-count checks
///   lemmas     - Monte-Carlo domination of the variance bounds
///   pl         - linear convergence on a gradient-dominated quadratic
///   prox       - proximal map and composite-step consistency checks
/// Throws std::invalid_argument for an unknown suite name.
std::vector<CheckResult> run_verify_suite(const std::string& suite);

std::vector<std::string> verify_suite_names();

}  // namespace zovr
