// Command-line front end: config-driven experiment runs, invariant suites,
// and formulaic hyperparameter selection.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "zovr/estimators.hpp"
#include "zovr/experiment.hpp"
#include "zovr/optimizers.hpp"
#include "zovr/verification.hpp"

namespace {

int cmd_run(const std::string& config_path) {
  const auto config = zovr::load_experiment_config(config_path);
  const auto result = zovr::run_experiment(config);
  for (const auto& path : result.trace_files) {
    std::printf("trace  %s\n", path.c_str());
  }
  std::printf("summary %s\n", result.summary_file.c_str());
  std::printf("%-24s %8s %14s %16s %18s %16s\n", "algorithm", "seeds",
              "queries_at", "median_f", "median_grad_sq", "queries_to_half");
  for (const auto& row : result.summary) {
    std::printf("%-24s %8d %14lld %16.8g %18.8g %16.0f\n",
                row.algorithm.c_str(), row.seeds,
                static_cast<long long>(row.queries_at), row.median_f,
                row.median_grad_norm_sq, row.median_queries_to_half);
  }
  if (const auto clamps = zovr::smoothing_clamp_events(); clamps > 0) {
    std::fprintf(stderr,
                 "warning: %lld smoothing steps were clamped to the "
                 "floating-point floor\n",
                 static_cast<long long>(clamps));
  }
  return 0;
}

int cmd_verify(const std::string& suite) {
  const auto results = zovr::run_verify_suite(suite);
  int failures = 0;
  for (const auto& check : results) {
    std::printf("[%s] %-40s %s\n", check.passed ? "PASS" : "FAIL",
                check.name.c_str(), check.detail.c_str());
    if (!check.passed) ++failures;
  }
  std::printf("%zu checks, %d failures\n", results.size(), failures);
  return failures == 0 ? 0 : 1;
}

int cmd_params(const std::string& corollary, long long n, int d, long long K,
               double L) {
  zovr::Corollary which;
  if (corollary == "cor1") {
    which = zovr::Corollary::kCor1;
  } else if (corollary == "cor2") {
    which = zovr::Corollary::kCor2;
  } else if (corollary == "cor3") {
    which = zovr::Corollary::kCor3;
  } else if (corollary == "cor4") {
    which = zovr::Corollary::kCor4;
  } else if (corollary == "theorem2") {
    which = zovr::Corollary::kTheorem2;
  } else {
    std::fprintf(stderr, "unknown corollary '%s'\n", corollary.c_str());
    return 2;
  }
  const auto hp = zovr::select_params(which, n, d, K, L);
  std::printf("eta   = %.17g\n", hp.eta);
  std::printf("q     = %d\n", hp.q);
  std::printf("K     = %d\n", hp.K);
  std::printf("s1    = %d\n", hp.s1);
  std::printf("s2    = %d\n", hp.s2);
  std::printf("beta  = %.17g\n", hp.smoothing.beta);
  std::printf("delta = %.17g\n", hp.smoothing.delta);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zeroth-order variance-reduced optimization bench"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run a config-driven experiment");
  run->add_option("config", config_path, "JSON experiment config")->required();

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run an invariant suite");
  verify->add_option("suite", suite, "estimators|lemmas|pl|prox")->required();

  std::string corollary;
  long long n = 0, K = 0;
  int d = 0;
  double L = 1.0;
  auto* params = app.add_subcommand("params", "print formulaic hyperparameters");
  params->add_option("corollary", corollary, "cor1|cor2|cor3|cor4|theorem2")
      ->required();
  params->add_option("--n", n, "number of components")->required();
  params->add_option("--d", d, "dimension")->required();
  params->add_option("--K", K, "iteration budget")->required();
  params->add_option("--L", L, "smoothness constant")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (verify->parsed()) return cmd_verify(suite);
    if (params->parsed()) return cmd_params(corollary, n, d, K, L);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
