#include "zovr/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "zovr/data_io.hpp"

namespace zovr {

namespace {

using nlohmann::json;

const std::vector<std::string> kAlgorithmNames = {
    "zo-svrg-coord-rand", "zo-svrg-coord",        "zo-spider-coord",
    "prox-zo-spider-coord", "zo-svrg-coord-rand-c", "zo-spider-coord-c",
    "zo-gd",              "zo-sgd"};

Corollary parse_selector(const std::string& name) {
  if (name == "cor1") return Corollary::kCor1;
  if (name == "cor2") return Corollary::kCor2;
  if (name == "cor3") return Corollary::kCor3;
  if (name == "cor4") return Corollary::kCor4;
  if (name == "theorem2") return Corollary::kTheorem2;
  throw std::runtime_error("unknown selector '" + name +
                           "' (expected cor1|cor2|cor3|cor4|theorem2)");
}

[[noreturn]] void config_fail(const std::string& what) {
  throw std::runtime_error("config error: " + what);
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_fail(std::string("invalid JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  try {
    if (!root.contains("problem")) config_fail("missing 'problem' section");
    const auto& p = root["problem"];
    const std::string type = p.value("type", "synthetic");
    if (type == "libsvm") {
      if (!p.contains("path")) config_fail("libsvm problem needs 'path'");
      cfg.problem.dataset_path = p["path"].get<std::string>();
    } else if (type == "synthetic") {
      SyntheticSpec syn;
      syn.n = p.value("n", syn.n);
      syn.d = p.value("d", syn.d);
      syn.separability = p.value("separability", syn.separability);
      syn.data_seed = p.value("data_seed", syn.data_seed);
      cfg.problem.synthetic = syn;
    } else {
      config_fail("problem.type must be 'synthetic' or 'libsvm'");
    }
    cfg.problem.alpha = p.value("alpha", cfg.problem.alpha);
    cfg.problem.l1_lambda = p.value("l1_lambda", cfg.problem.l1_lambda);
    cfg.problem.normalize = p.value("normalize", cfg.problem.normalize);
    if (p.contains("smoothness_L")) {
      cfg.problem.smoothness_L = p["smoothness_L"].get<double>();
    }

    if (!root.contains("algorithms") || !root["algorithms"].is_array() ||
        root["algorithms"].empty()) {
      config_fail("'algorithms' must be a non-empty array");
    }
    for (const auto& a : root["algorithms"]) {
      AlgorithmSpec spec;
      if (a.is_string()) {
        spec.name = a.get<std::string>();
      } else {
        if (!a.contains("name")) config_fail("algorithm entry needs 'name'");
        spec.name = a["name"].get<std::string>();
        if (a.contains("selector")) {
          spec.selector = parse_selector(a["selector"].get<std::string>());
        }
        if (a.contains("params")) {
          const auto& pr = a["params"];
          if (pr.contains("eta")) spec.eta = pr["eta"].get<double>();
          if (pr.contains("q")) spec.q = pr["q"].get<int>();
          if (pr.contains("K")) spec.K = pr["K"].get<int>();
          if (pr.contains("s1")) spec.s1 = pr["s1"].get<int>();
          if (pr.contains("s2")) spec.s2 = pr["s2"].get<int>();
          if (pr.contains("beta")) spec.beta = pr["beta"].get<double>();
          if (pr.contains("delta")) spec.delta = pr["delta"].get<double>();
        }
      }
      if (std::find(kAlgorithmNames.begin(), kAlgorithmNames.end(), spec.name) ==
          kAlgorithmNames.end()) {
        config_fail("unknown algorithm '" + spec.name + "'");
      }
      cfg.algorithms.push_back(std::move(spec));
    }

    if (!root.contains("seeds") || !root["seeds"].is_array() ||
        root["seeds"].empty()) {
      config_fail("'seeds' must be a non-empty array");
    }
    for (const auto& s : root["seeds"]) {
      cfg.seeds.push_back(s.get<std::uint64_t>());
    }

    cfg.K = root.value("K", cfg.K);
    if (root.contains("query_budget")) {
      const auto budget = root["query_budget"].get<std::int64_t>();
      if (budget <= 0) config_fail("query_budget must be positive");
      cfg.query_budget = budget;
    }
    cfg.output_dir = root.value("output_dir", cfg.output_dir);
    cfg.trace_stride = root.value("trace_stride", cfg.trace_stride);
    if (cfg.trace_stride < 1) config_fail("trace_stride must be >= 1");
    cfg.record_wall_time = root.value("record_wall_time", cfg.record_wall_time);
    cfg.workers = root.value("workers", cfg.workers);
  } catch (const json::exception& e) {
    config_fail(e.what());
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

std::unique_ptr<DifferentiableObjective> build_problem(const ProblemSpec& problem) {
  std::vector<DatasetRecord> records;
  int dim = 0;
  if (problem.dataset_path) {
    auto parsed = load_libsvm_file(*problem.dataset_path);
    records = std::move(parsed.records);
    dim = parsed.dim;
    // Normalization is an ingestion step; synthetic data is generated inside
    // [-1, 1] already and per-dimension rescaling would distort it.
    if (problem.normalize) scale_features_to_unit_box(records);
  } else if (problem.synthetic) {
    std::mt19937_64 rng(problem.synthetic->data_seed);
    records = make_synthetic_logreg_data(rng, problem.synthetic->n,
                                         problem.synthetic->d,
                                         problem.synthetic->separability);
    dim = problem.synthetic->d;
  } else {
    throw std::runtime_error("config error: no problem source given");
  }
  auto obj = make_nonconvex_logreg(records, problem.alpha, dim);
  if (problem.smoothness_L) {
    // Metadata override is applied by wrapping; simpler to rebuild the bound
    // by hand is not possible from outside, so expose it via a shim.
    struct Override final : DifferentiableObjective {
      std::unique_ptr<DifferentiableObjective> inner;
      Override(std::unique_ptr<DifferentiableObjective> in, double L)
          : inner(std::move(in)) {
        meta_ = inner->metadata();
        meta_.smoothness_L = L;
      }
      int num_components() const override { return inner->num_components(); }
      int dim() const override { return inner->dim(); }
      double eval_component(int i, std::span<const double> x) const override {
        return inner->eval_component(i, x);
      }
      void component_gradient(int i, std::span<const double> x,
                              std::span<double> out) const override {
        inner->component_gradient(i, x, out);
      }
    };
    return std::make_unique<Override>(std::move(obj), *problem.smoothness_L);
  }
  return obj;
}

namespace {

HyperParams resolve_params(const AlgorithmSpec& spec,
                           const ExperimentConfig& cfg,
                           const FiniteSumObjective& obj) {
  const int n = obj.num_components();
  const int d = obj.dim();
  const double L = obj.metadata().smoothness_L.value_or(1.0);

  HyperParams hp;
  if (spec.selector) {
    hp = select_params(*spec.selector, n, d, spec.K.value_or(cfg.K), L);
  } else {
    // Defaults: variance-reduced algorithms take a constant stepsize tied to
    // the smoothness bound, baselines the conventional c/d stepsize. Epochs
    // amortize the full coordinate pass over about one pass of cheap inner
    // batches.
    hp.K = cfg.K;
    hp.s1 = n;
    if (spec.name == "zo-gd" || spec.name == "zo-sgd") {
      hp.eta = baseline_stepsize(d);
      hp.q = 1;
      hp.s2 = std::min(n, 32);
    } else {
      hp.eta = 1.0 / (2.0 * L);
      hp.s2 = spec.name == "zo-svrg-coord-rand" ? std::min(n, 32)
                                                : std::min(n, 8);
      hp.q = std::clamp((n + 7) / 8, 1, hp.K);
    }
    hp.smoothing.beta = 0.01;
    hp.smoothing.delta = 0.001;
  }
  if (spec.eta) hp.eta = *spec.eta;
  if (spec.q) hp.q = *spec.q;
  if (spec.K) hp.K = *spec.K;
  if (spec.s1) hp.s1 = *spec.s1;
  if (spec.s2) hp.s2 = *spec.s2;
  if (spec.beta) hp.smoothing.beta = *spec.beta;
  if (spec.delta) hp.smoothing.delta = *spec.delta;
  return hp;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

// Last recorded row with queries <= checkpoint (the trace value in force at
// that budget level).
const TraceRow& row_at_budget(const RunTrace& trace, std::int64_t checkpoint) {
  const TraceRow* best = &trace.rows.front();
  for (const auto& row : trace.rows) {
    if (row.queries <= checkpoint) best = &row;
  }
  return *best;
}

std::string sanitize(const std::string& name) {
  std::string out = name;
  for (auto& c : out) {
    if (c == '/' || c == ' ') c = '_';
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  if (const char* env = std::getenv("ZOVR_OUTPUT_DIR"); env != nullptr && *env) {
    cfg.output_dir = env;
  }
  auto obj = build_problem(cfg.problem);
  const Regularizer reg = cfg.problem.l1_lambda > 0
                              ? Regularizer::l1(cfg.problem.l1_lambda)
                              : Regularizer::zero();

  struct Job {
    std::size_t alg_index;
    std::size_t seed_index;
  };
  std::vector<Job> jobs;
  for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s) jobs.push_back({a, s});
  }

  std::vector<RunTrace> traces(jobs.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      cfg.workers > 0 ? static_cast<unsigned>(cfg.workers)
                      : std::min<unsigned>(hw, static_cast<unsigned>(jobs.size()));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) break;
      const auto& spec = cfg.algorithms[jobs[j].alg_index];
      HyperParams hp = resolve_params(spec, cfg, *obj);
      hp.seed = cfg.seeds[jobs[j].seed_index];
      RunOptions opts;
      opts.query_budget = cfg.query_budget;
      opts.trace_stride = cfg.trace_stride;
      opts.record_wall_time = cfg.record_wall_time;
      traces[j] = run_algorithm(spec.name, *obj, reg, hp, opts);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w + 1 < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::filesystem::create_directories(cfg.output_dir);
  ExperimentResult result;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto& spec = cfg.algorithms[jobs[j].alg_index];
    const auto path = cfg.output_dir + "/" + sanitize(spec.name) + "__seed" +
                      std::to_string(cfg.seeds[jobs[j].seed_index]) + ".csv";
    write_trace(traces[j], path);
    result.trace_files.push_back(path);
  }

  // Medians are compared at a common query checkpoint: the configured budget,
  // or the smallest total across runs when no budget was set.
  std::int64_t checkpoint = cfg.query_budget.value_or(0);
  if (checkpoint == 0) {
    checkpoint = std::numeric_limits<std::int64_t>::max();
    for (const auto& trace : traces) {
      checkpoint = std::min(checkpoint, trace.total_queries);
    }
  }

  // Halfway target shared by every run: f(x0) minus half the best observed
  // descent at the checkpoint.
  double f0 = std::numeric_limits<double>::quiet_NaN();
  double f_best = std::numeric_limits<double>::infinity();
  for (const auto& trace : traces) {
    if (trace.rows.empty()) continue;
    if (std::isnan(f0)) f0 = trace.rows.front().f_value;
    f_best = std::min(f_best, row_at_budget(trace, checkpoint).f_value);
  }
  const double half_target = f0 - 0.5 * (f0 - f_best);

  for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
    std::vector<double> fs, gs, to_half;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      if (jobs[j].alg_index != a || traces[j].rows.empty()) continue;
      const auto& row = row_at_budget(traces[j], checkpoint);
      fs.push_back(row.f_value);
      gs.push_back(row.grad_norm_sq);
      double reached = 2.0 * static_cast<double>(checkpoint);
      for (const auto& r : traces[j].rows) {
        if (r.queries > checkpoint) break;
        if (r.f_value <= half_target) {
          reached = static_cast<double>(r.queries);
          break;
        }
      }
      to_half.push_back(reached);
    }
    AlgorithmSummary summary;
    summary.algorithm = cfg.algorithms[a].name;
    summary.seeds = static_cast<int>(fs.size());
    summary.queries_at = checkpoint;
    summary.median_f = median(fs);
    summary.median_grad_norm_sq = median(gs);
    summary.median_queries_to_half = median(to_half);
    result.summary.push_back(summary);
  }

  result.summary_file = cfg.output_dir + "/summary.csv";
  std::ofstream out(result.summary_file);
  if (!out) {
    throw std::runtime_error("cannot write summary: " + result.summary_file);
  }
  out << "algorithm,seeds,queries_at,median_f,median_grad_norm_sq,"
         "median_queries_to_half\n";
  char buf[224];
  for (const auto& s : result.summary) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%lld,%.17g,%.17g,%.17g\n",
                  s.algorithm.c_str(), s.seeds,
                  static_cast<long long>(s.queries_at), s.median_f,
                  s.median_grad_norm_sq, s.median_queries_to_half);
    out << buf;
  }
  return result;
}

}  // namespace zovr
