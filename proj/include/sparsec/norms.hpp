#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sparsec {

/// Attack norms supported throughout the library.
enum class Norm { l1, l2, linf };

inline constexpr Norm kAllNorms[] = {Norm::l1, Norm::l2, Norm::linf};

inline double lp_norm(const Eigen::VectorXd& v, Norm p) {
  switch (p) {
    case Norm::l1: return v.lpNorm<1>();
    case Norm::l2: return v.norm();
    case Norm::linf: return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
  }
  throw std::invalid_argument("unknown norm");
}

/// Dual norm ||.||_q with 1/p + 1/q = 1. Governs the distance from a point
/// to the hyperplane w.x + b = 0, which is |w.x + b| / ||w||_q under Lp.
inline double dual_norm(const Eigen::VectorXd& v, Norm p) {
  switch (p) {
    case Norm::l1: return lp_norm(v, Norm::linf);
    case Norm::l2: return lp_norm(v, Norm::l2);
    case Norm::linf: return lp_norm(v, Norm::l1);
  }
  throw std::invalid_argument("unknown norm");
}

/// f^(1/p): the largest Lp distance between two points of [0,1]^f.
/// Used both as the attack-budget ceiling and as the distance normalizer.
inline double lp_box_diameter(int f, Norm p) {
  if (f < 1) throw std::invalid_argument("lp_box_diameter: f must be >= 1");
  switch (p) {
    case Norm::l1: return static_cast<double>(f);
    case Norm::l2: return std::sqrt(static_cast<double>(f));
    case Norm::linf: return 1.0;
  }
  throw std::invalid_argument("unknown norm");
}

inline std::string to_string(Norm p) {
  switch (p) {
    case Norm::l1: return "l1";
    case Norm::l2: return "l2";
    case Norm::linf: return "linf";
  }
  throw std::invalid_argument("unknown norm");
}

inline Norm parse_norm(const std::string& s) {
  if (s == "l1") return Norm::l1;
  if (s == "l2") return Norm::l2;
  if (s == "linf" || s == "inf") return Norm::linf;
  throw std::invalid_argument("unknown norm '" + s + "' (expected l1, l2 or linf)");
}

}  // namespace sparsec
