// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 3-5 share a single cross-validated campaign; it runs on
// MNIST 7-vs-9 when SPARSEC_MNIST_IMAGES / SPARSEC_MNIST_LABELS point at IDX
// files, and otherwise on a pinned 200-feature synthetic dataset with 20
// informative features.

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sparsec/attack.hpp"
#include "sparsec/dataset.hpp"
#include "sparsec/metrics.hpp"
#include "sparsec/mnist.hpp"
#include "sparsec/model.hpp"
#include "sparsec/pipeline.hpp"
#include "sparsec/projection.hpp"

using namespace sparsec;

namespace {

struct Criterion {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;

  Criterion(int id_, std::string name_) : id(id_), name(std::move(name_)) {}
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream ss;
  ss.precision(precision);
  ss << v;
  return ss.str();
}

// --- criterion 1: projection oracle equivalence -----------------------------

Eigen::VectorXd l1_kkt_oracle(const Eigen::VectorXd& v, double d) {
  const int n = static_cast<int>(v.size());
  if (v.lpNorm<1>() <= d) return v;
  Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
  double best_dist = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    double sum = 0.0;
    int size = 0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        sum += std::abs(v[i]);
        ++size;
      }
    const double theta = (sum - d) / size;
    if (theta < 0.0) continue;
    bool valid = true;
    for (int i = 0; i < n && valid; ++i) {
      const bool in = mask & (1u << i);
      if (in && std::abs(v[i]) - theta < -1e-12) valid = false;
      if (!in && std::abs(v[i]) > theta + 1e-12) valid = false;
    }
    if (!valid) continue;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        const double z = std::max(std::abs(v[i]) - theta, 0.0);
        w[i] = v[i] < 0.0 ? -z : z;
      }
    const double dist = (w - v).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = w;
    }
  }
  return best;
}

Criterion criterion_projection_oracle() {
  Criterion c{1, "projection oracle equivalence + feasibility/idempotence fuzz"};
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> entry(-2.0, 2.0);
  const double radii[] = {0.5, 1.0, 2.0};

  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = entry(rng);
    const double d = radii[trial % 3];
    worst = std::max(worst, (project_l1(v, d) - l1_kkt_oracle(v, d)).norm());
  }

  double worst_feas = 0.0, worst_idem = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 20);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = entry(rng);
    const double d = radii[trial % 3];
    for (Norm p : kAllNorms) {
      const Eigen::VectorXd w = project(v, d, p);
      worst_feas = std::max(worst_feas, lp_norm(w, p) - d);
      worst_idem = std::max(worst_idem, (project(w, d, p) - w).lpNorm<Eigen::Infinity>());
    }
  }

  c.pass = worst <= 1e-4 && worst_feas <= 1e-9 && worst_idem <= 1e-12;
  c.detail = "max |P(v) - oracle|_2 = " + fmt(worst) + ", max feasibility excess = " + fmt(worst_feas) +
             ", max idempotence drift = " + fmt(worst_idem);
  return c;
}

// --- criterion 2: attack oracle equivalence ---------------------------------

Criterion criterion_attack_oracle() {
  Criterion c{2, "minimal attack within 5% of the dual-norm oracle"};
  std::mt19937_64 rng(2025);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> ux(0.3, 0.7);
  std::uniform_real_distribution<double> umargin(0.3, 1.5);

  double worst_rel = 0.0;
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int f = 2 + static_cast<int>(rng() % 49);
    LinearModel m;
    m.weights = Eigen::VectorXd::NullaryExpr(f, [&](Eigen::Index) { return gauss(rng); });
    if (m.weights.norm() < 0.1) m.weights[0] += 1.0;
    m.active_mask.assign(static_cast<size_t>(f), true);
    const Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(f, [&](Eigen::Index) { return ux(rng); });
    const double margin = umargin(rng) * (trial % 2 == 0 ? 1.0 : -1.0);
    m.bias = -m.weights.dot(x) + margin;
    const int y = predict(m, x);

    for (Norm p : kAllNorms) {
      const double want = analytic_min_distance(m, x, p);
      AttackConfig cfg;
      cfg.norm = p;
      cfg.box_clamp = false;
      cfg.binary_search_tolerance = 0.005 * want;
      const AttackResult res = minimal_attack(m, x, y, cfg);
      if (!res.succeeded) {
        c.detail = "attack failed at f=" + std::to_string(f) + " norm " + to_string(p);
        return c;
      }
      worst_rel = std::max(worst_rel, std::abs(res.gamma_min - want) / want);
      ++checked;
    }
  }
  c.pass = worst_rel < 0.05;
  c.detail = std::to_string(checked) + " attacks, worst relative error " + fmt(worst_rel);
  return c;
}

// --- criteria 3-5: the shared campaign --------------------------------------

struct CampaignOutput {
  SecurityReport security;
  MMDReport mmd;
  int full_count = 0;
  std::string dataset_name;
};

CampaignOutput run_main_campaign() {
  CampaignOutput out;
  Dataset raw;
  const char* idx_images = std::getenv("SPARSEC_MNIST_IMAGES");
  const char* idx_labels = std::getenv("SPARSEC_MNIST_LABELS");
  if (idx_images && idx_labels) {
    raw = mnist_to_dataset(idx_images, idx_labels);
    out.dataset_name = "mnist-7v9";
  } else {
    SyntheticWideParams p;  // defaults: 200 features, 20 informative
    raw = gen_synthetic_wide(p, 7);
    out.dataset_name = "synthetic-200x20";
  }
  out.full_count = raw.feature_count();

  ExperimentConfig cfg;
  cfg.dataset_path = out.dataset_name;
  cfg.target_feature_counts = {out.full_count, 100, 50, 25, 10};
  cfg.norms = {Norm::l1, Norm::l2, Norm::linf};
  cfg.k_folds = 10;
  cfg.fold_cap = 1;
  cfg.sample_cap = 100;
  cfg.sparsify_threshold = 0.01;
  cfg.seed = 42;

  const AttackCampaign camp = run_attack_campaign(cfg, raw);
  out.security = build_security_report(camp);
  out.mmd = run_mmd_analysis(cfg, camp);
  return out;
}

Criterion criterion_distance_trend(const CampaignOutput& camp) {
  Criterion c{3, "normalized distance nondecreasing as features drop; 10-vs-full ratios"};
  const auto& rows = camp.security.rows;  // ordered full, 100, 50, 25, 10

  bool monotone = true;
  std::string seqs;
  for (Norm p : kAllNorms) {
    seqs += to_string(p) + ":";
    for (size_t r = 0; r < rows.size(); ++r) {
      const double v = rows[r].per_norm.at(p).normalized_mean;
      seqs += " " + fmt(v, 3);
      if (r > 0 && v < rows[r - 1].per_norm.at(p).normalized_mean - 1e-12) monotone = false;
    }
    seqs += "; ";
  }

  const auto& full = rows.front();
  const auto& ten = rows.back();
  const double r1 = ten.per_norm.at(Norm::l1).normalized_mean / full.per_norm.at(Norm::l1).normalized_mean;
  const double r2 = ten.per_norm.at(Norm::l2).normalized_mean / full.per_norm.at(Norm::l2).normalized_mean;
  const double ri =
      ten.per_norm.at(Norm::linf).normalized_mean / full.per_norm.at(Norm::linf).normalized_mean;

  c.pass = monotone && r1 >= 2.0 && r2 >= 3.0 && ri >= 4.0;
  c.detail = "monotone=" + std::string(monotone ? "yes" : "no") + ", ratios l1=" + fmt(r1, 3) +
             " (>=2), l2=" + fmt(r2, 3) + " (>=3), linf=" + fmt(ri, 3) + " (>=4) [" + seqs + "]";
  return c;
}

Criterion criterion_tradeoff(const CampaignOutput& camp) {
  Criterion c{4, "10-feature model: accuracy within 6 points of full, strictly higher security"};
  const auto& full = camp.security.rows.front();
  const auto& ten = camp.security.rows.back();
  const double drop = full.accuracy - ten.accuracy;
  c.pass = drop <= 0.06 && ten.security_score > full.security_score;
  c.detail = "accuracy " + fmt(full.accuracy, 4) + " -> " + fmt(ten.accuracy, 4) + " (drop " +
             fmt(drop, 3) + "), security score " + fmt(full.security_score, 4) + " -> " +
             fmt(ten.security_score, 4) + " (x" + fmt(ten.security_score / full.security_score, 3) + ")";
  return c;
}

Criterion criterion_mmd_gap(const CampaignOutput& camp) {
  Criterion c{5, "adversarial MMD >= 10x baseline for every (count, norm, class) cell"};
  const size_t expected_cells = camp.security.rows.size() * 3 * 2;
  double worst = std::numeric_limits<double>::infinity();
  std::string worst_cell = "none";
  for (const MMDRow& row : camp.mmd.rows) {
    if (!row.ratio) {
      c.detail = "cell without a ratio (baseline 0)";
      return c;
    }
    if (*row.ratio < worst) {
      worst = *row.ratio;
      worst_cell = std::to_string(row.feature_count) + "/" + to_string(row.norm) + "/class" +
                   std::to_string(row.class_label);
    }
  }
  c.pass = camp.mmd.rows.size() == expected_cells && worst >= 10.0;
  c.detail = std::to_string(camp.mmd.rows.size()) + "/" + std::to_string(expected_cells) +
             " cells, worst ratio " + fmt(worst, 3) + " at " + worst_cell;
  return c;
}

// --- criterion 6: MMD identities --------------------------------------------

Criterion criterion_mmd_identities() {
  Criterion c{6, "MMD identities: D(X,X)=0, symmetry, kernel scale-invariance, singleton example"};
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  Eigen::MatrixXd X(30, 7), Z(22, 7);
  for (int i = 0; i < X.rows(); ++i)
    for (int j = 0; j < 7; ++j) X(i, j) = u(rng);
  for (int i = 0; i < Z.rows(); ++i)
    for (int j = 0; j < 7; ++j) Z(i, j) = u(rng);

  const bool self_zero = mmd_estimate(X, X).value == 0.0;
  const bool symmetric = std::abs(mmd_estimate(X, Z).value - mmd_estimate(Z, X).value) <= 1e-12;

  double worst_scale = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd x(5), z(5);
    for (int j = 0; j < 5; ++j) {
      x[j] = 0.05 + u(rng);
      z[j] = 0.05 + u(rng);
    }
    worst_scale = std::max(worst_scale, std::abs(mmd_kernel(7.0 * x, 0.3 * z) - mmd_kernel(x, z)));
  }

  Eigen::MatrixXd a(1, 2), b(1, 2);
  a << 1.0, 0.0;
  b << 0.0, 1.0;
  const double singleton = mmd_estimate(a, b).value;

  c.pass = self_zero && symmetric && worst_scale <= 1e-12 && singleton == 2.0;
  c.detail = std::string("D(X,X)=") + (self_zero ? "0" : "nonzero") +
             ", symmetry ok=" + (symmetric ? "yes" : "no") + ", scale drift " + fmt(worst_scale) +
             ", singleton example " + fmt(singleton, 8);
  return c;
}

// --- criterion 7: determinism ------------------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Criterion criterion_determinism() {
  Criterion c{7, "identical config and seed give byte-identical JSON reports"};
  SyntheticWideParams p;
  p.n_per_class = 150;
  p.n_features = 40;
  p.n_informative = 8;
  const Dataset ds = gen_synthetic_wide(p, 5);

  ExperimentConfig cfg;
  cfg.dataset_path = "determinism-check";
  cfg.target_feature_counts = {40, 8};
  cfg.norms = {Norm::l1, Norm::l2};
  cfg.k_folds = 5;
  cfg.fold_cap = 2;
  cfg.sample_cap = 20;
  cfg.train.epochs = 300;
  cfg.seed = 11;

  const std::string p1 = "/tmp/sparsec_acc_run1.json";
  const std::string p2 = "/tmp/sparsec_acc_run2.json";
  const std::string m1 = "/tmp/sparsec_acc_mmd1.json";
  const std::string m2 = "/tmp/sparsec_acc_mmd2.json";
  {
    const AttackCampaign camp = run_attack_campaign(cfg, ds);
    emit_report(build_security_report(camp), ReportFormat::json, p1);
    emit_report(run_mmd_analysis(cfg, camp), ReportFormat::json, m1);
  }
  {
    const AttackCampaign camp = run_attack_campaign(cfg, ds);
    emit_report(build_security_report(camp), ReportFormat::json, p2);
    emit_report(run_mmd_analysis(cfg, camp), ReportFormat::json, m2);
  }
  const bool sec_equal = slurp(p1) == slurp(p2);
  const bool mmd_equal = slurp(m1) == slurp(m2);
  std::remove(p1.c_str());
  std::remove(p2.c_str());
  std::remove(m1.c_str());
  std::remove(m2.c_str());
  c.pass = sec_equal && mmd_equal;
  c.detail = std::string("security reports identical=") + (sec_equal ? "yes" : "no") +
             ", mmd reports identical=" + (mmd_equal ? "yes" : "no");
  return c;
}

// --- criterion 8: gradient check ----------------------------------------------

Criterion criterion_gradient_check() {
  Criterion c{8, "input gradient matches central finite differences (1e-5 relative)"};
  std::mt19937_64 rng(2027);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int f = 2 + static_cast<int>(rng() % 19);
    LinearModel m;
    m.weights = Eigen::VectorXd::NullaryExpr(f, [&](Eigen::Index) { return gauss(rng); });
    m.bias = gauss(rng);
    m.active_mask.assign(static_cast<size_t>(f), true);
    const Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(f, [&](Eigen::Index) { return u01(rng); });
    const int y = static_cast<int>(rng() % 2);

    const Eigen::VectorXd g = input_gradient(m, x, y);
    auto loss = [&](const Eigen::VectorXd& xx) {
      const double z = decision_value(m, xx);
      return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - y * z;
    };
    Eigen::VectorXd fd(f);
    const double h = 1e-6;
    for (int j = 0; j < f; ++j) {
      Eigen::VectorXd hi = x, lo = x;
      hi[j] += h;
      lo[j] -= h;
      fd[j] = (loss(hi) - loss(lo)) / (2.0 * h);
    }
    const double scale = std::max(g.lpNorm<Eigen::Infinity>(), 1e-12);
    worst = std::max(worst, (fd - g).lpNorm<Eigen::Infinity>() / scale);
  }
  c.pass = worst < 1e-5;
  c.detail = "worst relative error " + fmt(worst) + " over 100 random triples";
  return c;
}

void print_result(const Criterion& c) {
  std::cout << (c.pass ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": " << c.name << " — "
            << c.detail << " (" << fmt(c.seconds, 3) << "s)\n";
  std::cout.flush();
}

template <typename F>
Criterion timed(F&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Criterion c = fn();
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

}  // namespace

int main() {
  std::vector<Criterion> results;

  results.push_back(timed(criterion_projection_oracle));
  print_result(results.back());
  if (results.back().seconds > 60.0) {
    results.back().pass = false;
    std::cout << "       criterion 1 exceeded its 60s budget\n";
  }

  results.push_back(timed(criterion_attack_oracle));
  print_result(results.back());
  if (results.back().seconds > 120.0) {
    results.back().pass = false;
    std::cout << "       criterion 2 exceeded its 120s budget\n";
  }

  const auto t0 = std::chrono::steady_clock::now();
  const CampaignOutput camp = run_main_campaign();
  const double campaign_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "       [campaign: " << camp.dataset_name << ", " << fmt(campaign_seconds, 3) << "s]\n";

  {
    Criterion c = timed([&] { return criterion_distance_trend(camp); });
    c.seconds += campaign_seconds;
    if (c.seconds > 1800.0) c.pass = false;
    results.push_back(c);
    print_result(results.back());
  }
  results.push_back(timed([&] { return criterion_tradeoff(camp); }));
  print_result(results.back());
  results.push_back(timed([&] { return criterion_mmd_gap(camp); }));
  print_result(results.back());

  results.push_back(timed(criterion_mmd_identities));
  print_result(results.back());
  results.push_back(timed(criterion_determinism));
  print_result(results.back());
  results.push_back(timed(criterion_gradient_check));
  print_result(results.back());

  int failures = 0;
  for (const Criterion& c : results) failures += c.pass ? 0 : 1;
  std::cout << (failures == 0 ? "all criteria passed\n"
                              : std::to_string(failures) + " criteria failed\n");
  return failures == 0 ? 0 : 1;
}
