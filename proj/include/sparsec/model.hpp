#pragma once

#include <Eigen/Core>
#include <limits>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsec/dataset.hpp"
#include "sparsec/log.hpp"

namespace sparsec {

enum class RegKind { none, l1, l2 };

inline std::string to_string(RegKind r) {
  switch (r) {
    case RegKind::none: return "none";
    case RegKind::l1: return "l1";
    case RegKind::l2: return "l2";
  }
  throw std::invalid_argument("unknown reg_kind");
}

inline RegKind parse_reg_kind(const std::string& s) {
  if (s == "none") return RegKind::none;
  if (s == "l1") return RegKind::l1;
  if (s == "l2") return RegKind::l2;
  throw std::invalid_argument("unknown reg_kind '" + s + "' (expected none, l1 or l2)");
}

/// Logistic-regression model with an explicit active-feature mask.
/// Invariant: active_mask[i] == false implies weights[i] == 0 exactly.
struct LinearModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  double lambda = 0.0;
  RegKind reg_kind = RegKind::none;
  std::vector<bool> active_mask;
  double sparsify_threshold = 0.0;

  int dim() const { return static_cast<int>(weights.size()); }
  int feature_count() const {
    int c = 0;
    for (bool b : active_mask) c += b ? 1 : 0;
    return c;
  }
};

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 2000;
  uint64_t seed = 0;
  double init_scale = 0.0;  // stddev of the random weight init; 0 = all zeros
};

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace detail {

// Numerically stable cross-entropy: softplus(z) - y*z.
inline double cross_entropy(double z, double y) {
  const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
  return softplus - y * z;
}

inline double penalty_value(const Eigen::VectorXd& w, RegKind reg, double lambda) {
  switch (reg) {
    case RegKind::none: return 0.0;
    case RegKind::l1: return lambda * w.lpNorm<1>();
    case RegKind::l2: return lambda * w.squaredNorm();
  }
  return 0.0;
}

}  // namespace detail

/// Mean cross-entropy over the dataset plus the regularization penalty
/// (the bias is never regularized).
inline double training_objective(const LinearModel& m, const Dataset& ds) {
  const Eigen::VectorXd z = ds.features * m.weights + Eigen::VectorXd::Constant(ds.n(), m.bias);
  double loss = 0.0;
  for (int i = 0; i < ds.n(); ++i) loss += detail::cross_entropy(z[i], ds.labels[static_cast<size_t>(i)]);
  return loss / ds.n() + detail::penalty_value(m.weights, m.reg_kind, m.lambda);
}

/// Full-batch gradient descent on mean sigmoid cross-entropy plus an optional
/// L1 (lambda*||w||_1) or L2 (lambda*||w||_2^2) penalty on the weights.
/// The L1 subgradient at w_i == 0 is taken as 0. Deterministic per seed.
/// If objective_trace is given it receives epochs+1 objective values: the
/// objective before any update and after each epoch.
inline LinearModel train(const Dataset& ds, RegKind reg, double lambda, const TrainConfig& cfg,
                         std::vector<double>* objective_trace = nullptr) {
  if (ds.n() < 1) throw std::invalid_argument("train: empty dataset");
  if (lambda < 0.0) throw std::invalid_argument("train: lambda must be >= 0");
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("train: learning_rate must be > 0");
  if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");

  const int n = ds.n();
  const int f = ds.feature_count();
  LinearModel m;
  m.lambda = lambda;
  m.reg_kind = reg;
  m.active_mask.assign(static_cast<size_t>(f), true);
  m.weights = Eigen::VectorXd::Zero(f);
  if (cfg.init_scale > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> init(0.0, cfg.init_scale);
    for (int j = 0; j < f; ++j) m.weights[j] = init(rng);
  }

  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = ds.labels[static_cast<size_t>(i)];

  if (objective_trace) {
    objective_trace->clear();
    objective_trace->reserve(static_cast<size_t>(cfg.epochs) + 1);
  }

  Eigen::VectorXd z(n), s(n);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    z = ds.features * m.weights + Eigen::VectorXd::Constant(n, m.bias);
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
      s[i] = sigmoid(z[i]);
      loss += detail::cross_entropy(z[i], y[i]);
    }
    loss = loss / n + detail::penalty_value(m.weights, reg, lambda);
    if (!std::isfinite(loss))
      throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch));
    if (objective_trace) objective_trace->push_back(loss);

    const Eigen::VectorXd grad = ds.features.transpose() * (s - y) / n;
    if (reg == RegKind::l2 && lambda > 0.0) {
      m.weights -= cfg.learning_rate * (grad + 2.0 * lambda * m.weights);
    } else if (reg == RegKind::l1 && lambda > 0.0) {
      // Penalty step truncated at the zero crossing (soft threshold). A raw
      // sign(w) subgradient step with a constant rate oscillates with
      // amplitude lr*lambda once the penalty dominates, which would make
      // strongly regularized weights large instead of small.
      m.weights -= cfg.learning_rate * grad;
      const double shrink = cfg.learning_rate * lambda;
      for (int j = 0; j < f; ++j) {
        const double mag = std::abs(m.weights[j]) - shrink;
        m.weights[j] = mag <= 0.0 ? 0.0 : (m.weights[j] < 0.0 ? -mag : mag);
      }
    } else {
      m.weights -= cfg.learning_rate * grad;
    }
    m.bias -= cfg.learning_rate * (s - y).mean();
  }

  const double final_objective = training_objective(m, ds);
  if (!std::isfinite(final_objective))
    throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(cfg.epochs));
  if (objective_trace) objective_trace->push_back(final_objective);
  return m;
}

/// Zeroes weights with |w_i| < threshold and updates the active mask.
/// The bias is untouched. Idempotent at a fixed threshold.
inline LinearModel sparsify(const LinearModel& model, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("sparsify: threshold must be >= 0");
  LinearModel out = model;
  out.sparsify_threshold = threshold;
  for (int j = 0; j < model.dim(); ++j) {
    const bool keep = model.active_mask[static_cast<size_t>(j)] && std::abs(model.weights[j]) >= threshold;
    out.active_mask[static_cast<size_t>(j)] = keep;
    if (!keep) out.weights[j] = 0.0;
  }
  return out;
}

inline double decision_value(const LinearModel& m, const Eigen::VectorXd& x) {
  if (x.size() != m.weights.size())
    throw std::invalid_argument("decision_value: expected " + std::to_string(m.weights.size()) +
                                " features, got " + std::to_string(x.size()));
  return m.weights.dot(x) + m.bias;
}

inline double predict_proba(const LinearModel& m, const Eigen::VectorXd& x) {
  return sigmoid(decision_value(m, x));
}

/// 1 iff predict_proba >= 0.5, i.e. iff the decision value is >= 0.
inline int predict(const LinearModel& m, const Eigen::VectorXd& x) {
  return decision_value(m, x) >= 0.0 ? 1 : 0;
}

/// Gradient of the cross-entropy loss with respect to the input:
/// (sigmoid(w.x + b) - y) * w. Zero at masked features by construction.
inline Eigen::VectorXd input_gradient(const LinearModel& m, const Eigen::VectorXd& x, int y) {
  if (y != 0 && y != 1) throw std::invalid_argument("input_gradient: y must be 0 or 1");
  const double residual = sigmoid(decision_value(m, x)) - y;
  return residual * m.weights;
}

inline double evaluate_accuracy(const LinearModel& m, const Dataset& ds) {
  if (ds.n() < 1) throw std::invalid_argument("evaluate_accuracy: empty dataset");
  int correct = 0;
  for (int i = 0; i < ds.n(); ++i)
    if (predict(m, ds.features.row(i).transpose()) == ds.labels[static_cast<size_t>(i)]) ++correct;
  return static_cast<double>(correct) / ds.n();
}

struct LambdaProbe {
  double lambda = 0.0;
  int achieved_count = 0;
};

/// Outcome of the per-target regularization-path search.
struct LambdaSearchResult {
  int target = 0;
  double lambda = 0.0;
  LinearModel model;  // trained then sparsified at `lambda`
  int achieved_count = 0;
  bool converged = false;
  std::vector<LambdaProbe> trace;  // probes in evaluation order
  bool trace_monotonic = true;     // counts nonincreasing in lambda over the trace
};

namespace detail {

inline bool audit_trace_monotonic(std::vector<LambdaProbe> trace) {
  std::sort(trace.begin(), trace.end(),
            [](const LambdaProbe& a, const LambdaProbe& b) { return a.lambda < b.lambda; });
  for (size_t i = 1; i < trace.size(); ++i)
    if (trace[i].achieved_count > trace[i - 1].achieved_count) return false;
  return true;
}

}  // namespace detail

/// Searches for a lambda whose trained-then-sparsified model hits each target
/// feature count within +-max(1, 0.1*target), by bisection on log10(lambda)
/// over [log10_lo, log10_hi] (feature count is treated as nonincreasing in
/// lambda). lambda = 0 is probed first so the full model short-circuits.
/// Targets that cannot be reached within the probe budget come back with
/// converged == false and the nearest achieved count.
inline std::map<int, LambdaSearchResult> lambda_search(const Dataset& ds, const std::vector<int>& targets,
                                                       const TrainConfig& cfg, double threshold,
                                                       RegKind reg = RegKind::l1, double log10_lo = -6.0,
                                                       double log10_hi = 3.0, int max_probes = 40) {
  if (targets.empty()) throw std::invalid_argument("lambda_search: no targets");
  for (int t : targets)
    if (t < 1 || t > ds.feature_count())
      throw std::invalid_argument("lambda_search: target " + std::to_string(t) + " outside [1, f]");

  std::map<double, LinearModel> cache;
  auto probe = [&](double lambda) -> const LinearModel& {
    auto it = cache.find(lambda);
    if (it == cache.end()) {
      LinearModel m = sparsify(train(ds, reg, lambda, cfg), threshold);
      it = cache.emplace(lambda, std::move(m)).first;
      log_debug("lambda_search: lambda=" + std::to_string(lambda) + " -> " +
                std::to_string(it->second.feature_count()) + " features");
    }
    return it->second;
  };

  std::map<int, LambdaSearchResult> results;
  for (int target : targets) {
    LambdaSearchResult res;
    res.target = target;
    const double tol = std::max(1.0, 0.1 * target);

    double best_gap = std::numeric_limits<double>::infinity();
    auto consider = [&](double lambda, const LinearModel& m) {
      const int c = m.feature_count();
      res.trace.push_back({lambda, c});
      const double gap = std::abs(c - target);
      if (gap < best_gap) {
        best_gap = gap;
        res.lambda = lambda;
        res.model = m;
        res.achieved_count = c;
      }
      return gap <= tol;
    };

    bool done = consider(0.0, probe(0.0));
    if (!done) {
      double lo = log10_lo, hi = log10_hi;
      done = consider(std::pow(10.0, lo), probe(std::pow(10.0, lo)));
      if (!done && res.trace.back().achieved_count < target) {
        // even the weakest penalty keeps too few features; nothing to bisect
      } else if (!done) {
        done = consider(std::pow(10.0, hi), probe(std::pow(10.0, hi)));
        if (!done && res.trace.back().achieved_count > target) {
          // even the strongest penalty keeps too many features
        } else {
          while (!done && static_cast<int>(res.trace.size()) < max_probes && hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            const LinearModel& m = probe(std::pow(10.0, mid));
            done = consider(std::pow(10.0, mid), m);
            if (m.feature_count() > target)
              lo = mid;
            else
              hi = mid;
          }
        }
      }
    }
    res.converged = done;
    res.trace_monotonic = detail::audit_trace_monotonic(res.trace);
    if (!res.trace_monotonic)
      log_warn("lambda_search: feature count not monotone in lambda around target " + std::to_string(target));
    if (!res.converged)
      log_warn("lambda_search: target " + std::to_string(target) + " unreachable, nearest achieved count " +
               std::to_string(res.achieved_count));
    results.emplace(target, std::move(res));
  }
  return results;
}

}  // namespace sparsec
