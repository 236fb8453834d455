#pragma once

#include <Eigen/Core>
#include <string>
#include <array>
#include <map>
#include <stdexcept>
#include <vector>

#include "sparsec/norms.hpp"

namespace sparsec {

/// Minimal attack distance as a fraction of the maximum possible Lp
/// distortion over f features in [0,1]: raw / f^(1/p). For p = inf the
/// divisor is 1.
inline double normalized_distance(double raw, int f, Norm p) {
  if (raw < 0.0) throw std::invalid_argument("normalized_distance: raw must be >= 0");
  return raw / lp_box_diameter(f, p);
}

/// Aggregated security score: the arithmetic mean of the per-norm mean
/// normalized distances.
struct SecurityScore {
  std::map<Norm, double> per_norm;
  double value = 0.0;
};

inline SecurityScore security_score(const std::map<Norm, double>& per_norm_means) {
  if (per_norm_means.empty()) throw std::invalid_argument("security_score: empty per-norm map");
  SecurityScore s;
  s.per_norm = per_norm_means;
  double sum = 0.0;
  for (const auto& [norm, v] : per_norm_means) sum += v;
  s.value = sum / static_cast<double>(per_norm_means.size());
  return s;
}

/// Normalized linear kernel K(x,z) = x.z / (||x||_1 ||z||_1). Invariant under
/// positive rescaling of either argument; defined as 0 when either vector has
/// zero L1 norm (an all-zero sample carries no direction).
inline double mmd_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
  const double nx = x.lpNorm<1>();
  const double nz = z.lpNorm<1>();
  if (nx == 0.0 || nz == 0.0) return 0.0;
  return x.dot(z) / (nx * nz);
}

struct MMDEstimate {
  double value = 0.0;
  int n = 0;  // rows of the first set
  int m = 0;  // rows of the second set
};

namespace detail {

// Rows rescaled to unit L1 norm; zero rows stay zero, which makes the plain
// dot product equal mmd_kernel for every pair.
inline Eigen::MatrixXd l1_normalize_rows(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd out = X;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double norm = X.row(i).lpNorm<1>();
    if (norm > 0.0) out.row(i) /= norm;
  }
  return out;
}

}  // namespace detail

/// Empirical MMD estimate with the normalized linear kernel, diagonal terms
/// included:
///   (1/n^2) sum K(x_i,x_j) - (2/nm) sum K(x_i,z_j) + (1/m^2) sum K(z_i,z_j)
/// The three terms are arranged so that identical inputs cancel to exactly 0.
inline MMDEstimate mmd_estimate(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z) {
  if (X.rows() < 1 || Z.rows() < 1) throw std::invalid_argument("mmd_estimate: empty sample set");
  if (X.cols() != Z.cols()) throw std::invalid_argument("mmd_estimate: dimension mismatch");
  const Eigen::MatrixXd Xn = detail::l1_normalize_rows(X);
  const Eigen::MatrixXd Zn = detail::l1_normalize_rows(Z);
  const double n = static_cast<double>(X.rows());
  const double m = static_cast<double>(Z.rows());
  const double sum_xx = (Xn * Xn.transpose()).sum();
  const double sum_xz = (Xn * Zn.transpose()).sum();
  const double sum_zz = (Zn * Zn.transpose()).sum();
  const double term_xx = sum_xx / (n * n);
  const double term_xz = 2.0 * (sum_xz / (n * m));
  const double term_zz = sum_zz / (m * m);
  MMDEstimate est;
  est.value = term_xx - term_xz + term_zz;
  est.n = static_cast<int>(X.rows());
  est.m = static_cast<int>(Z.rows());
  return est;
}

struct MMDClassRow {
  int class_label = 0;
  Norm norm = Norm::l2;
  MMDEstimate baseline;     // D(train_a, test_a)
  MMDEstimate adversarial;  // D(train_a, adv samples with source class a)
};

/// One class cell of the detectability analysis: baseline statistical
/// distance between clean train and test samples of class `class_label`,
/// against the distance between clean train samples and minimal adversarial
/// samples whose source class is `class_label`.
inline MMDClassRow mmd_analysis_class(const Eigen::MatrixXd& train_a, const Eigen::MatrixXd& test_a,
                                      const Eigen::MatrixXd& adv_a, int class_label, Norm norm) {
  if (train_a.rows() < 1 || test_a.rows() < 1 || adv_a.rows() < 1)
    throw std::invalid_argument("mmd_analysis: class " + std::to_string(class_label) + " has no samples");
  MMDClassRow row;
  row.class_label = class_label;
  row.norm = norm;
  row.baseline = mmd_estimate(train_a, test_a);
  row.adversarial = mmd_estimate(train_a, adv_a);
  return row;
}

/// Both class cells for a binary problem; index c of each array holds the
/// class-c sample set. Throws if any set is empty.
inline std::vector<MMDClassRow> mmd_analysis(const std::array<Eigen::MatrixXd, 2>& train_by_class,
                                             const std::array<Eigen::MatrixXd, 2>& test_by_class,
                                             const std::array<Eigen::MatrixXd, 2>& adv_by_source_class,
                                             Norm norm) {
  std::vector<MMDClassRow> rows;
  for (int c = 0; c < 2; ++c)
    rows.push_back(mmd_analysis_class(train_by_class[static_cast<size_t>(c)],
                                      test_by_class[static_cast<size_t>(c)],
                                      adv_by_source_class[static_cast<size_t>(c)], c, norm));
  return rows;
}

}  // namespace sparsec
