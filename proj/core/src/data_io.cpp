#include "zovr/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace zovr {

namespace {

[[noreturn]] void parse_fail(std::int64_t line_no, const std::string& what) {
  throw std::runtime_error("libsvm parse error at line " +
                           std::to_string(line_no) + ": " + what);
}

int parse_label(const std::string& token, std::int64_t line_no) {
  if (token == "+1" || token == "1") return 1;
  if (token == "-1" || token == "0") return -1;
  parse_fail(line_no, "unrecognized label '" + token + "'");
}

}  // namespace

ParsedDataset parse_libsvm(std::istream& in) {
  ParsedDataset out;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Strip trailing CR from CRLF files.
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;

    DatasetRecord rec;
    rec.label = parse_label(token, line_no);
    int prev_index = 0;
    while (ls >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == token.size()) {
        parse_fail(line_no, "malformed feature token '" + token + "'");
      }
      int index = 0;
      double value = 0.0;
      try {
        std::size_t used = 0;
        index = std::stoi(token.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("trailing");
        const std::string value_str = token.substr(colon + 1);
        value = std::stod(value_str, &used);
        if (used != value_str.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        parse_fail(line_no, "malformed feature token '" + token + "'");
      }
      if (index <= 0) parse_fail(line_no, "feature index must be positive");
      if (index <= prev_index) {
        parse_fail(line_no, "feature indices must be strictly increasing");
      }
      if (!std::isfinite(value)) parse_fail(line_no, "non-finite feature value");
      prev_index = index;
      rec.features.emplace_back(index, value);
      out.dim = std::max(out.dim, index);
    }
    out.records.push_back(std::move(rec));
  }
  if (out.records.empty()) throw std::runtime_error("empty dataset");
  return out;
}

ParsedDataset load_libsvm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  return parse_libsvm(in);
}

void write_libsvm(const std::vector<DatasetRecord>& records, std::ostream& out) {
  char buf[64];
  for (const auto& rec : records) {
    out << (rec.label > 0 ? "+1" : "-1");
    for (const auto& [index, value] : rec.features) {
      std::snprintf(buf, sizeof(buf), " %d:%.17g", index, value);
      out << buf;
    }
    out << '\n';
  }
}

std::vector<DatasetRecord> make_synthetic_logreg_data(std::mt19937_64& rng,
                                                      int n, int d,
                                                      double separability) {
  if (n < 1 || d < 1) throw std::invalid_argument("n and d must be >= 1");
  if (separability < 0) throw std::invalid_argument("separability must be >= 0");

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // The planted rule lives on two strong coordinates; the remaining
  // dimensions are weak nuisance features. This keeps the learned weights on
  // a long, well-conditioned path, the regime where constant-stepsize methods
  // separate from O(1/d)-stepsize baselines.
  const int signal_dims = std::min(d, 2);
  const double signal_scale = 0.3;
  const double noise_scale = 0.05;
  const double rule_weight = 1.0 / std::sqrt(static_cast<double>(signal_dims));
  // Standard deviation of the unclipped margin, used so separability acts on
  // a unit-variance score.
  const double margin_std = signal_scale;

  std::vector<DatasetRecord> records(n);
  for (auto& rec : records) {
    rec.features.reserve(d);
    double margin = 0.0;
    for (int j = 0; j < d; ++j) {
      const double scale = j < signal_dims ? signal_scale : noise_scale;
      const double value = std::clamp(scale * gauss(rng), -1.0, 1.0);
      rec.features.emplace_back(j + 1, value);
      if (j < signal_dims) margin += rule_weight * value;
    }
    // P(y = +1) = sigmoid(separability * margin / margin_std); the
    // infinite-separability limit is the exact sign rule.
    double p_pos;
    if (std::isinf(separability)) {
      p_pos = margin > 0 ? 1.0 : (margin < 0 ? 0.0 : 0.5);
    } else {
      p_pos = 1.0 / (1.0 + std::exp(-separability * margin / margin_std));
    }
    rec.label = unif(rng) < p_pos ? 1 : -1;
  }
  return records;
}

void scale_features_to_unit_box(std::vector<DatasetRecord>& records) {
  int dim = 0;
  for (const auto& rec : records) {
    if (!rec.features.empty()) dim = std::max(dim, rec.features.back().first);
  }
  Vec max_abs(static_cast<std::size_t>(dim) + 1, 0.0);
  for (const auto& rec : records) {
    for (const auto& [index, value] : rec.features) {
      max_abs[index] = std::max(max_abs[index], std::fabs(value));
    }
  }
  for (auto& rec : records) {
    for (auto& [index, value] : rec.features) {
      if (max_abs[index] > 0.0) value /= max_abs[index];
    }
  }
}

void write_trace(const RunTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file for writing: " + path);
  out << "k,queries,f,grad_norm_sq,wall_ms\n";
  char buf[160];
  for (const auto& row : trace.rows) {
    std::snprintf(buf, sizeof(buf), "%lld,%lld,%.17g,%.17g,%.17g\n",
                  static_cast<long long>(row.k),
                  static_cast<long long>(row.queries), row.f_value,
                  row.grad_norm_sq, row.wall_ms);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failure on trace file: " + path);
}

RunTrace read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trace file: " + path);
  if (line != "k,queries,f,grad_norm_sq,wall_ms") {
    throw std::runtime_error("unexpected trace header in " + path);
  }
  RunTrace trace;
  std::int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    TraceRow row;
    long long k = 0, queries = 0;
    if (std::sscanf(line.c_str(), "%lld,%lld,%lg,%lg,%lg", &k, &queries,
                    &row.f_value, &row.grad_norm_sq, &row.wall_ms) != 5) {
      throw std::runtime_error("malformed trace row at line " +
                               std::to_string(line_no) + " of " + path);
    }
    row.k = k;
    row.queries = queries;
    trace.rows.push_back(row);
  }
  if (!trace.rows.empty()) trace.total_queries = trace.rows.back().queries;
  return trace;
}

}  // namespace zovr
