#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace sparsec {

/// A dense labeled dataset: one sample per row, binary labels in {0,1}.
/// Feature values are expected (but not forced) to live in [0,1]; use
/// normalize_minmax to get there.
struct Dataset {
  Eigen::MatrixXd features;               // n x f
  std::vector<int> labels;                // length n, values in {0,1}
  std::vector<std::string> feature_names; // empty, or length f

  int n() const { return static_cast<int>(features.rows()); }
  int feature_count() const { return static_cast<int>(features.cols()); }
};

/// Assignment of each sample to one of k folds; sizes differ by at most one.
struct FoldAssignment {
  std::vector<int> fold_index;  // length n, values in [0, k)
  int k = 0;

  std::vector<int> test_indices(int fold) const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(fold_index.size()); ++i)
      if (fold_index[i] == fold) out.push_back(i);
    return out;
  }
  std::vector<int> train_indices(int fold) const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(fold_index.size()); ++i)
      if (fold_index[i] != fold) out.push_back(i);
    return out;
  }
};

namespace detail {

inline std::string format_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("failed to format double");
  return std::string(buf, ptr);
}

inline bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\t' || *(last - 1) == '\r')) --last;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace detail

/// Loads a CSV dataset: UTF-8, comma separated, header row, first column
/// named "label" holding {0,1}, remaining columns numeric features. Errors
/// carry the offending line (1-based, counting the header) and column.
inline Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file, header row required");
  const auto header = detail::split_csv_line(line);
  if (header.empty() || header[0] != "label")
    throw std::runtime_error(path + ":1: first column must be named 'label'");
  const size_t f = header.size() - 1;

  std::vector<double> values;
  std::vector<int> labels;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != f + 1)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": ragged row, expected " +
                               std::to_string(f + 1) + " fields, got " + std::to_string(fields.size()));
    double label_value = 0.0;
    if (!detail::parse_double(fields[0], label_value))
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": column 1: non-numeric label '" +
                               fields[0] + "'");
    if (label_value != 0.0 && label_value != 1.0)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": invalid label '" + fields[0] +
                               "', must be 0 or 1");
    labels.push_back(static_cast<int>(label_value));
    for (size_t c = 1; c < fields.size(); ++c) {
      double v = 0.0;
      if (!detail::parse_double(fields[c], v))
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": column " + std::to_string(c + 1) +
                                 ": non-numeric cell '" + fields[c] + "'");
      values.push_back(v);
    }
  }

  Dataset ds;
  const size_t n = labels.size();
  ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < f; ++j)
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * f + j];
  ds.labels = std::move(labels);
  ds.feature_names.assign(header.begin() + 1, header.end());
  return ds;
}

/// Writes a dataset as CSV. Doubles are printed with shortest round-trip
/// formatting so load_csv(save_csv(ds)) reproduces the values bit-exactly.
inline void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "label";
  for (int j = 0; j < ds.feature_count(); ++j) {
    if (!ds.feature_names.empty())
      out << ',' << ds.feature_names[static_cast<size_t>(j)];
    else
      out << ",x" << j;
  }
  out << '\n';
  for (int i = 0; i < ds.n(); ++i) {
    out << ds.labels[static_cast<size_t>(i)];
    for (int j = 0; j < ds.feature_count(); ++j) out << ',' << detail::format_double(ds.features(i, j));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

/// Row subset of a dataset, in the order given.
inline Dataset subset(const Dataset& ds, const std::vector<int>& rows) {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), ds.features.cols());
  out.labels.resize(rows.size());
  out.feature_names = ds.feature_names;
  for (size_t r = 0; r < rows.size(); ++r) {
    out.features.row(static_cast<Eigen::Index>(r)) = ds.features.row(rows[r]);
    out.labels[r] = ds.labels[static_cast<size_t>(rows[r])];
  }
  return out;
}

/// Rescales every feature column to [0,1] via (x - min) / (max - min).
/// Constant columns map to all zeros. Idempotent.
inline Dataset normalize_minmax(const Dataset& ds) {
  if (ds.n() < 1) throw std::invalid_argument("normalize_minmax: empty dataset");
  Dataset out = ds;
  for (int j = 0; j < ds.feature_count(); ++j) {
    const double lo = ds.features.col(j).minCoeff();
    const double hi = ds.features.col(j).maxCoeff();
    const double range = hi - lo;
    if (range == 0.0)
      out.features.col(j).setZero();
    else
      out.features.col(j) = (ds.features.col(j).array() - lo) / range;
  }
  return out;
}

/// Deterministic pseudo-random k-fold partition; fold sizes are n/k rounded
/// up or down (they differ by at most one).
inline FoldAssignment kfold_split(int n, int k, uint64_t seed) {
  if (k < 2) throw std::invalid_argument("kfold_split: k must be >= 2");
  if (k > n) throw std::invalid_argument("kfold_split: k must be <= n");
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  FoldAssignment fa;
  fa.k = k;
  fa.fold_index.resize(static_cast<size_t>(n));
  for (int pos = 0; pos < n; ++pos) fa.fold_index[static_cast<size_t>(order[static_cast<size_t>(pos)])] = pos % k;
  return fa;
}

/// Two-feature Gaussian toy set: class 0 has feature 1 ~ N(2, 0.25),
/// class 1 has feature 1 ~ N(4, 0.25); feature 2 ~ N(3, 0.25) for everyone
/// (the second parameter is the variance, sigma = 0.5). Only feature 1
/// carries signal. Values are not clipped to [0,1]; normalize if needed.
inline Dataset gen_synthetic(int n_per_class, uint64_t seed) {
  if (n_per_class < 1) throw std::invalid_argument("gen_synthetic: n_per_class must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.5);
  const int n = 2 * n_per_class;
  Dataset ds;
  ds.features.resize(n, 2);
  ds.labels.resize(static_cast<size_t>(n));
  ds.feature_names = {"x0", "x1"};
  for (int i = 0; i < n; ++i) {
    const int label = i < n_per_class ? 0 : 1;
    const double mean1 = label == 0 ? 2.0 : 4.0;
    ds.features(i, 0) = mean1 + noise(rng);
    ds.features(i, 1) = 3.0 + noise(rng);
    ds.labels[static_cast<size_t>(i)] = label;
  }
  return ds;
}

/// Parameters of the wide synthetic generator. The class-mean gap profile is
/// three blocks: a flat strongly-informative block, a decaying mid block
/// (together the n_informative features), and a weak background tail over the
/// rest. Gap signs alternate by feature index so the discriminative direction
/// mixes positive and negative weights, and a fraction of labels is flipped
/// to emulate annotation noise.
struct SyntheticWideParams {
  int n_per_class = 1250;
  int n_features = 200;
  int n_informative = 20;
  double gap_strong = 0.9;
  double gap_mid_hi = 0.5;
  double gap_mid_lo = 0.25;
  double gap_weak_hi = 0.06;
  double gap_weak_lo = 0.01;
  double noise_sigma = 0.05;
  double label_flip_fraction = 0.10;
};

inline Dataset gen_synthetic_wide(const SyntheticWideParams& p, uint64_t seed) {
  if (p.n_per_class < 1) throw std::invalid_argument("gen_synthetic_wide: n_per_class must be >= 1");
  if (p.n_informative < 2 || p.n_informative > p.n_features)
    throw std::invalid_argument("gen_synthetic_wide: need 2 <= n_informative <= n_features");
  const int n = 2 * p.n_per_class;
  const int f = p.n_features;

  std::vector<double> gaps(static_cast<size_t>(f), 0.0);
  const int half = p.n_informative / 2;
  for (int j = 0; j < half; ++j) gaps[static_cast<size_t>(j)] = p.gap_strong;
  const int mid = p.n_informative - half;
  for (int j = 0; j < mid; ++j)
    gaps[static_cast<size_t>(half + j)] =
        mid == 1 ? p.gap_mid_hi : p.gap_mid_hi + (p.gap_mid_lo - p.gap_mid_hi) * j / (mid - 1);
  const int weak = f - p.n_informative;
  for (int j = 0; j < weak; ++j)
    gaps[static_cast<size_t>(p.n_informative + j)] =
        weak == 1 ? p.gap_weak_hi : p.gap_weak_hi + (p.gap_weak_lo - p.gap_weak_hi) * j / (weak - 1);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, p.noise_sigma);
  Dataset ds;
  ds.features.resize(n, f);
  ds.labels.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int label = i < p.n_per_class ? 0 : 1;
    const double side = label == 0 ? -0.5 : 0.5;
    for (int j = 0; j < f; ++j) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      ds.features(i, j) = 0.5 + side * sign * gaps[static_cast<size_t>(j)] + noise(rng);
    }
    ds.labels[static_cast<size_t>(i)] = label;
  }

  if (p.label_flip_fraction > 0.0) {
    const int n_flip = static_cast<int>(std::lround(p.label_flip_fraction * n));
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int t = 0; t < n_flip; ++t) {
      const auto i = static_cast<size_t>(order[static_cast<size_t>(t)]);
      ds.labels[i] = 1 - ds.labels[i];
    }
  }
  return ds;
}

}  // namespace sparsec
