#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sparsec/norms.hpp"

namespace sparsec {

namespace detail {
inline void require_finite(const Eigen::VectorXd& v, const char* who) {
  if (!v.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite input");
}
inline void require_positive_radius(double d, const char* who) {
  if (!(d > 0.0)) throw std::invalid_argument(std::string(who) + ": radius must be > 0");
}
}  // namespace detail

/// Euclidean projection onto the L1 ball of radius d:
///   argmin ||w - v||_2^2  s.t.  ||w||_1 <= d
/// Sort-based O(n log n) soft-thresholding (Duchi et al., ICML 2008).
/// Feasible inputs are returned unchanged, exactly.
inline Eigen::VectorXd project_l1(const Eigen::VectorXd& v, double d) {
  detail::require_positive_radius(d, "project_l1");
  detail::require_finite(v, "project_l1");
  if (v.lpNorm<1>() <= d) return v;

  const Eigen::Index n = v.size();
  std::vector<double> mu(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) mu[static_cast<size_t>(i)] = std::abs(v[i]);
  std::sort(mu.begin(), mu.end(), std::greater<double>());

  // rho = max{ j : mu_j - (sum_{r<=j} mu_r - d)/j > 0 }, theta from that prefix.
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cumulative += mu[static_cast<size_t>(j)];
    const double t = (cumulative - d) / static_cast<double>(j + 1);
    if (mu[static_cast<size_t>(j)] - t > 0.0) theta = t;
  }

  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = std::max(std::abs(v[i]) - theta, 0.0);
    w[i] = v[i] < 0.0 ? -z : z;
  }
  return w;
}

/// Euclidean projection onto the L2 ball of radius d. Branches on feasibility
/// instead of always rescaling so feasible inputs come back bit-identical.
inline Eigen::VectorXd project_l2(const Eigen::VectorXd& v, double d) {
  detail::require_positive_radius(d, "project_l2");
  detail::require_finite(v, "project_l2");
  const double norm = v.norm();
  if (norm <= d) return v;
  return v * (d / norm);
}

/// Euclidean projection onto the Linf ball of radius d: per-coordinate clamp.
inline Eigen::VectorXd project_linf(const Eigen::VectorXd& v, double d) {
  detail::require_positive_radius(d, "project_linf");
  detail::require_finite(v, "project_linf");
  if (v.size() == 0 || v.lpNorm<Eigen::Infinity>() <= d) return v;
  return v.cwiseMax(-d).cwiseMin(d);
}

inline Eigen::VectorXd project(const Eigen::VectorXd& v, double d, Norm p) {
  switch (p) {
    case Norm::l1: return project_l1(v, d);
    case Norm::l2: return project_l2(v, d);
    case Norm::linf: return project_linf(v, d);
  }
  throw std::invalid_argument("unknown norm");
}

}  // namespace sparsec
