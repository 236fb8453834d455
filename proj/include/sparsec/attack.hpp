#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sparsec/log.hpp"
#include "sparsec/model.hpp"
#include "sparsec/norms.hpp"
#include "sparsec/projection.hpp"

namespace sparsec {

struct AttackConfig {
  Norm norm = Norm::l2;
  // Step length as a fraction of the current budget: alpha = step_size * gamma.
  double step_size = 0.05;
  int max_iterations = 1000;
  // Absolute budget resolution for the binary search. Unset means
  // 1e-3 * f^(1/p), i.e. 1e-3 in normalized units.
  std::optional<double> binary_search_tolerance;
  double gamma_upper_init = 1.0;
  bool box_clamp = true;
};

struct AttackResult {
  Eigen::VectorXd source;
  std::optional<Eigen::VectorXd> adversarial;
  double gamma_min = 0.0;
  Norm norm = Norm::l2;
  bool succeeded = false;
  int iterations_used = 0;  // inner iterations summed over all budget probes
  std::vector<std::pair<double, bool>> search_trace;  // (budget, success)
  bool trace_monotonic = true;  // no failing budget above a succeeding one
};

/// One run of projected gradient ascent at a fixed budget gamma:
///   x* <- x + project_p(x* - x + alpha * g_hat, gamma)
/// where g_hat is the unit-normalized input gradient of the loss at the
/// source class (for a linear model the direction is +-w/||w||, so the
/// normalization changes step lengths, never the path geometry). Stops as
/// soon as the prediction flips to y_target, or gives up after
/// max_iterations. With box_clamp the iterate is clamped to [0,1]^f after
/// every step; since the source is in the box this never grows any
/// coordinate's perturbation, so the budget still holds.
inline std::optional<Eigen::VectorXd> fixed_budget_attack(const LinearModel& model, const Eigen::VectorXd& x,
                                                          int y, int y_target, const AttackConfig& cfg,
                                                          double gamma, int* iterations_used = nullptr) {
  if (!(gamma > 0.0)) throw std::invalid_argument("fixed_budget_attack: gamma must be > 0");
  if (y == y_target) throw std::invalid_argument("fixed_budget_attack: y and y_target must differ");
  if (!(cfg.step_size > 0.0)) throw std::invalid_argument("fixed_budget_attack: step_size must be > 0");
  if (iterations_used) *iterations_used = 0;
  if (predict(model, x) == y_target) return x;

  const double alpha = cfg.step_size * gamma;
  Eigen::VectorXd x_adv = x;
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    Eigen::VectorXd grad = input_gradient(model, x_adv, y);
    if (!grad.allFinite())
      throw std::runtime_error("fixed_budget_attack: non-finite gradient at iteration " + std::to_string(iter));
    const double gnorm = grad.norm();
    if (iterations_used) *iterations_used = iter;
    if (gnorm == 0.0) return std::nullopt;  // flat loss surface, cannot make progress

    Eigen::VectorXd step = (x_adv - x) + (alpha / gnorm) * grad;
    x_adv = x + project(step, gamma, cfg.norm);
    if (cfg.box_clamp) x_adv = x_adv.cwiseMax(0.0).cwiseMin(1.0);
    if (predict(model, x_adv) == y_target) return x_adv;
  }
  return std::nullopt;
}

/// Lp distance from x to the decision hyperplane of a linear model:
/// |w.x + b| / ||w||_q with q the dual norm. Exact minimal perturbation for
/// an unconstrained attack, used as the verification oracle.
inline double analytic_min_distance(const LinearModel& model, const Eigen::VectorXd& x, Norm p) {
  const double denom = dual_norm(model.weights, p);
  if (denom == 0.0) throw std::invalid_argument("analytic_min_distance: zero weight vector");
  return std::abs(decision_value(model, x)) / denom;
}

/// Minimal-perturbation attack: binary search over the budget gamma, doubling
/// an initial upper bound until a fixed-budget attack succeeds (failure is
/// declared at the norm's box diameter f^(1/p)), then bisecting down to the
/// tolerance. gamma_min is the smallest budget whose attack succeeded, and
/// `adversarial` holds the sample from that run.
inline AttackResult minimal_attack(const LinearModel& model, const Eigen::VectorXd& x, int y,
                                   const AttackConfig& cfg) {
  if (y != 0 && y != 1) throw std::invalid_argument("minimal_attack: y must be 0 or 1");
  const int y_target = 1 - y;

  AttackResult res;
  res.source = x;
  res.norm = cfg.norm;

  if (predict(model, x) == y_target) {
    res.adversarial = x;
    res.gamma_min = 0.0;
    res.succeeded = true;
    return res;
  }

  const int f = model.dim();
  const double diameter = lp_box_diameter(f, cfg.norm);
  const double tol = cfg.binary_search_tolerance.value_or(1e-3 * diameter);
  if (!(tol > 0.0)) throw std::invalid_argument("minimal_attack: tolerance must be > 0");

  int iters = 0;
  auto attempt = [&](double gamma) {
    int used = 0;
    auto adv = fixed_budget_attack(model, x, y, y_target, cfg, gamma, &used);
    iters += used;
    res.search_trace.emplace_back(gamma, adv.has_value());
    return adv;
  };

  // Doubling phase: find a successful upper bound.
  double lo = 0.0;
  double hi = std::min(cfg.gamma_upper_init, diameter);
  std::optional<Eigen::VectorXd> best = attempt(hi);
  while (!best && hi < diameter) {
    lo = hi;
    hi = std::min(2.0 * hi, diameter);
    best = attempt(hi);
  }
  if (!best) {
    res.gamma_min = diameter;  // reported as the box diameter on failure
    res.succeeded = false;
    res.iterations_used = iters;
    return res;
  }

  // Bisection phase.
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    auto adv = attempt(mid);
    if (adv) {
      hi = mid;
      best = std::move(adv);
    } else {
      lo = mid;
    }
  }

  res.adversarial = std::move(best);
  res.gamma_min = hi;
  res.succeeded = true;
  res.iterations_used = iters;

  for (const auto& [g_fail, ok_fail] : res.search_trace) {
    if (ok_fail) continue;
    for (const auto& [g_ok, ok] : res.search_trace)
      if (ok && g_fail > g_ok + tol) res.trace_monotonic = false;
  }
  if (!res.trace_monotonic)
    log_warn("minimal_attack: non-monotone search trace (inner attack likely not converged)");

  // Postconditions checked on every result.
  if (predict(model, *res.adversarial) != y_target)
    throw std::logic_error("minimal_attack: adversarial sample not classified as target");
  const double dist = lp_norm(*res.adversarial - x, cfg.norm);
  if (dist > res.gamma_min * (1.0 + 1e-6) + 1e-12)
    throw std::logic_error("minimal_attack: perturbation exceeds gamma_min");
  return res;
}

}  // namespace sparsec
