#pragma once

#include <cstdint>
#include <vector>

namespace zovr {

using Vec = std::vector<double>;

struct TraceRow {
  std::int64_t k = 0;        // iteration index
  std::int64_t queries = 0;  // cumulative meter reading after this iteration's estimate
  double f_value = 0.0;      // f(x^k), oracle-computed for reporting
  double grad_norm_sq = 0.0; // ||grad f(x^k)||^2, or ||G(x^k)||^2 for proximal runs
  double wall_ms = 0.0;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  int output_index = 0;  // zeta; drawn uniformly from {0..K} before the run
  Vec output_x;          // x^zeta
  Vec final_x;           // iterate after the last completed update
  std::int64_t total_queries = 0;
  std::int64_t outer_queries = 0;  // spent on epoch-head (anchor) estimates
  std::int64_t inner_queries = 0;
  bool aborted_non_finite = false;
  // Full trajectory x^0, x^1, ...; populated only when
  // RunOptions::capture_iterates is set (diagnostic use).
  std::vector<Vec> iterates;
};

}  // namespace zovr
