#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "zovr/trace.hpp"

namespace zovr {

/// One sparse labelled sample in LIBSVM convention: label in {-1,+1},
/// features as (1-based index, value) pairs with strictly increasing indices.
struct DatasetRecord {
  int label = 1;
  std::vector<std::pair<int, double>> features;
};

struct ParsedDataset {
  std::vector<DatasetRecord> records;
  int dim = 0;  // max feature index seen in the file
};

/// Parses `<label> <idx>:<val> ...` lines. Labels "+1"/"1" map to +1 and
/// "-1"/"0" to -1. Blank lines and lines starting with '#' are skipped.
/// Throws std::runtime_error with the offending line number on malformed
/// tokens, non-increasing indices, unknown labels, or an empty dataset.
ParsedDataset parse_libsvm(std::istream& in);
ParsedDataset load_libsvm_file(const std::string& path);

void write_libsvm(const std::vector<DatasetRecord>& records, std::ostream& out);

/// Gaussian features clipped to [-1, 1]; labels planted by a random linear
/// rule and flipped with logistic noise that vanishes as separability grows.
/// separability = 0 gives coin-flip labels, +infinity a separable dataset.
std::vector<DatasetRecord> make_synthetic_logreg_data(std::mt19937_64& rng,
                                                      int n, int d,
                                                      double separability);

/// In-place per-dimension max-abs scaling onto [-1, 1]. Dimensions that are
/// identically zero are left untouched.
void scale_features_to_unit_box(std::vector<DatasetRecord>& records);

/// Trace CSV with header `k,queries,f,grad_norm_sq,wall_ms`. Floating values
/// are written with 17 significant digits so read_trace inverts write_trace
/// exactly for finite values.
void write_trace(const RunTrace& trace, const std::string& path);
RunTrace read_trace(const std::string& path);

}  // namespace zovr
