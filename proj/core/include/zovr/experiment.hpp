#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zovr/objectives.hpp"
#include "zovr/optimizers.hpp"

namespace zovr {

struct SyntheticSpec {
  int n = 200;
  int d = 20;
  double separability = 2.0;
  std::uint64_t data_seed = 7;
};

struct ProblemSpec {
  std::optional<std::string> dataset_path;  // LIBSVM file
  std::optional<SyntheticSpec> synthetic;
  double alpha = 0.1;
  double l1_lambda = 0.0;  // > 0 adds an l1 term for proximal algorithms
  bool normalize = true;   // scale features to [-1, 1] per dimension
  std::optional<double> smoothness_L;  // overrides the objective's own bound
};

/// Either a corollary selector or explicit parameter overrides; overrides are
/// merged over the algorithm's defaults.
struct AlgorithmSpec {
  std::string name;
  std::optional<Corollary> selector;
  std::optional<double> eta;
  std::optional<int> q, K, s1, s2;
  std::optional<double> beta, delta;
};

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<std::uint64_t> seeds;
  int K = 1000;  // iteration budget for algorithms that do not set their own
  std::optional<std::int64_t> query_budget;
  std::string output_dir = "out";
  int trace_stride = 1;
  bool record_wall_time = false;
  int workers = 0;  // 0 -> hardware concurrency
};

/// Parses the JSON experiment config; throws std::runtime_error with a
/// descriptive message on any schema violation.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

struct AlgorithmSummary {
  std::string algorithm;
  int seeds = 0;
  std::int64_t queries_at = 0;      // common query checkpoint
  double median_f = 0.0;            // median f at the checkpoint
  double median_grad_norm_sq = 0.0; // median stationarity measure there
  // Median queries to reach f(x0) - (f(x0) - f_best) / 2, where f_best is the
  // lowest checkpoint value across all runs; 2x the checkpoint when a run
  // never gets there.
  double median_queries_to_half = 0.0;
};

struct ExperimentResult {
  std::vector<AlgorithmSummary> summary;
  std::vector<std::string> trace_files;
  std::string summary_file;
};

/// Runs every (algorithm, seed) pair in a worker pool, writes one trace CSV
/// per pair plus summary.csv, and returns the summary. The environment
/// variable ZOVR_OUTPUT_DIR overrides config.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Builds the configured objective (for tools that need direct access).
std::unique_ptr<DifferentiableObjective> build_problem(const ProblemSpec& problem);

}  // namespace zovr
