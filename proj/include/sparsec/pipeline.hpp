#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsec/attack.hpp"
#include "sparsec/dataset.hpp"
#include "sparsec/log.hpp"
#include "sparsec/metrics.hpp"
#include "sparsec/model.hpp"
#include "sparsec/norms.hpp"

namespace sparsec {

/// Bad usage, unreadable inputs, unwritable outputs. CLI exit code 1.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Failures inside a running experiment. CLI exit code 2.
struct experiment_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string dataset_path;
  std::vector<int> target_feature_counts;
  std::vector<Norm> norms = {Norm::l1, Norm::l2, Norm::linf};
  int k_folds = 10;
  double sparsify_threshold = 0.01;
  AttackConfig attack;  // the norm field is overridden per campaign norm
  TrainConfig train;
  RegKind reg_kind = RegKind::l1;
  uint64_t seed = 42;
  std::optional<int> sample_cap = 100;  // attacked samples per fold
  std::optional<int> fold_cap;          // evaluate only the first folds
};

// ---------------------------------------------------------------------------
// Config serialization (JSON mirrors the field names; flags override file).
// ---------------------------------------------------------------------------

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["dataset_path"] = c.dataset_path;
  j["target_feature_counts"] = c.target_feature_counts;
  std::vector<std::string> norms;
  for (Norm p : c.norms) norms.push_back(to_string(p));
  j["norms"] = norms;
  j["k_folds"] = c.k_folds;
  j["sparsify_threshold"] = c.sparsify_threshold;
  j["attack"] = {{"step_size", c.attack.step_size},
                 {"max_iterations", c.attack.max_iterations},
                 {"gamma_upper_init", c.attack.gamma_upper_init},
                 {"box_clamp", c.attack.box_clamp}};
  if (c.attack.binary_search_tolerance)
    j["attack"]["binary_search_tolerance"] = *c.attack.binary_search_tolerance;
  j["train"] = {{"learning_rate", c.train.learning_rate},
                {"epochs", c.train.epochs},
                {"seed", c.train.seed},
                {"init_scale", c.train.init_scale}};
  j["reg_kind"] = to_string(c.reg_kind);
  j["seed"] = c.seed;
  if (c.sample_cap) j["sample_cap"] = *c.sample_cap;
  if (c.fold_cap) j["fold_cap"] = *c.fold_cap;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.dataset_path = j.value("dataset_path", std::string());
    c.target_feature_counts = j.value("target_feature_counts", std::vector<int>());
    if (j.contains("norms")) {
      c.norms.clear();
      for (const auto& s : j.at("norms")) c.norms.push_back(parse_norm(s.get<std::string>()));
    }
    c.k_folds = j.value("k_folds", c.k_folds);
    c.sparsify_threshold = j.value("sparsify_threshold", c.sparsify_threshold);
    if (j.contains("attack")) {
      const auto& a = j.at("attack");
      c.attack.step_size = a.value("step_size", c.attack.step_size);
      c.attack.max_iterations = a.value("max_iterations", c.attack.max_iterations);
      c.attack.gamma_upper_init = a.value("gamma_upper_init", c.attack.gamma_upper_init);
      c.attack.box_clamp = a.value("box_clamp", c.attack.box_clamp);
      if (a.contains("binary_search_tolerance") && !a.at("binary_search_tolerance").is_null())
        c.attack.binary_search_tolerance = a.at("binary_search_tolerance").get<double>();
    }
    if (j.contains("train")) {
      const auto& t = j.at("train");
      c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
      c.train.epochs = t.value("epochs", c.train.epochs);
      c.train.seed = t.value("seed", c.train.seed);
      c.train.init_scale = t.value("init_scale", c.train.init_scale);
    }
    if (j.contains("reg_kind")) c.reg_kind = parse_reg_kind(j.at("reg_kind").get<std::string>());
    c.seed = j.value("seed", c.seed);
    if (j.contains("sample_cap") && !j.at("sample_cap").is_null())
      c.sample_cap = j.at("sample_cap").get<int>();
    if (j.contains("fold_cap") && !j.at("fold_cap").is_null()) c.fold_cap = j.at("fold_cap").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("invalid config: ") + e.what());
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(path + ": invalid JSON: " + e.what());
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Campaign: the raw artifacts of a full cross-validated attack run.
// ---------------------------------------------------------------------------

struct AttackRecord {
  int sample_index = 0;
  int fold = -1;
  int feature_count = 0;  // target count of the attacked model (-1 for standalone runs)
  Norm norm = Norm::l2;
  int source_class = 0;
  bool pre_misclassified = false;  // source already predicted as the target class
  bool succeeded = false;
  double gamma_min = 0.0;
  double normalized_distance = 0.0;
  int iterations_used = 0;
  Eigen::VectorXd adversarial;  // set only for crafted successes
};

struct TargetFoldModel {
  int fold = 0;
  LinearModel model;
  double accuracy = 0.0;  // on the full held-out fold
};

struct TargetRun {
  int target = 0;
  double lambda = 0.0;
  bool search_converged = true;
  std::string diagnostic;  // nonempty when the lambda search missed the target
  std::vector<TargetFoldModel> fold_models;
};

struct AttackCampaign {
  ExperimentConfig config;
  Dataset data;  // min-max normalized working copy
  FoldAssignment folds;
  std::vector<int> evaluated_folds;
  std::vector<std::vector<int>> attacked_samples;  // per evaluated fold, capped + sorted
  std::vector<TargetRun> targets;
  std::vector<AttackRecord> records;  // ordered by (target, fold, norm, sample)
};

/// Trains per-fold models for every target feature count and runs minimal
/// attacks for every configured norm against every (capped) held-out sample.
/// Lambdas are searched once, on the first evaluated fold's training split,
/// and reused across folds; each fold still trains its own model on its own
/// nine-tenths, so no sample is ever attacked by a model trained on it.
inline AttackCampaign run_attack_campaign(const ExperimentConfig& config, const Dataset& raw) {
  if (config.target_feature_counts.empty()) throw config_error("no target_feature_counts configured");
  if (config.norms.empty()) throw config_error("no norms configured");
  if (config.k_folds < 2) throw config_error("k_folds must be >= 2");

  AttackCampaign camp;
  camp.config = config;
  camp.data = normalize_minmax(raw);
  const int n = camp.data.n();
  camp.folds = kfold_split(n, config.k_folds, config.seed);

  const int n_folds = config.fold_cap ? std::min(config.k_folds, *config.fold_cap) : config.k_folds;
  if (n_folds < 1) throw config_error("fold_cap must be >= 1");
  for (int fold = 0; fold < n_folds; ++fold) camp.evaluated_folds.push_back(fold);

  // Capped held-out samples per fold, chosen by a seeded shuffle so both
  // classes are represented regardless of row order in the file.
  for (int fold : camp.evaluated_folds) {
    std::vector<int> test = camp.folds.test_indices(fold);
    std::mt19937_64 rng(config.seed * 1000003ull + static_cast<uint64_t>(fold));
    std::shuffle(test.begin(), test.end(), rng);
    if (config.sample_cap && static_cast<int>(test.size()) > *config.sample_cap)
      test.resize(static_cast<size_t>(*config.sample_cap));
    std::sort(test.begin(), test.end());
    camp.attacked_samples.push_back(std::move(test));
  }

  log_info("lambda search on fold " + std::to_string(camp.evaluated_folds.front()) + " training split");
  const Dataset search_train = subset(camp.data, camp.folds.train_indices(camp.evaluated_folds.front()));
  const auto searched = lambda_search(search_train, config.target_feature_counts, config.train,
                                      config.sparsify_threshold, config.reg_kind);

  for (int target : config.target_feature_counts) {
    const LambdaSearchResult& sr = searched.at(target);
    TargetRun run;
    run.target = target;
    run.lambda = sr.lambda;
    run.search_converged = sr.converged;
    if (!sr.converged)
      run.diagnostic = "lambda search missed target " + std::to_string(target) + ": nearest achieved count " +
                       std::to_string(sr.achieved_count) + " at lambda " + detail::format_double(sr.lambda);

    for (size_t fi = 0; fi < camp.evaluated_folds.size(); ++fi) {
      const int fold = camp.evaluated_folds[fi];
      const Dataset train_ds = subset(camp.data, camp.folds.train_indices(fold));
      const Dataset test_ds = subset(camp.data, camp.folds.test_indices(fold));
      TargetFoldModel tfm;
      tfm.fold = fold;
      tfm.model = sparsify(train(train_ds, config.reg_kind, sr.lambda, config.train), config.sparsify_threshold);
      tfm.accuracy = evaluate_accuracy(tfm.model, test_ds);
      log_info("target " + std::to_string(target) + " fold " + std::to_string(fold) + ": " +
               std::to_string(tfm.model.feature_count()) + " features, accuracy " +
               detail::format_double(tfm.accuracy));

      const int fc = tfm.model.feature_count();
      for (Norm norm : config.norms) {
        AttackConfig acfg = config.attack;
        acfg.norm = norm;
        for (int idx : camp.attacked_samples[fi]) {
          const Eigen::VectorXd x = camp.data.features.row(idx).transpose();
          const int y = camp.data.labels[static_cast<size_t>(idx)];
          AttackRecord rec;
          rec.sample_index = idx;
          rec.fold = fold;
          rec.feature_count = target;
          rec.norm = norm;
          rec.source_class = y;
          const AttackResult ar = minimal_attack(tfm.model, x, y, acfg);
          rec.pre_misclassified = ar.succeeded && ar.gamma_min == 0.0;
          rec.succeeded = ar.succeeded;
          rec.gamma_min = ar.gamma_min;
          rec.normalized_distance = fc > 0 ? normalized_distance(ar.gamma_min, fc, norm) : 0.0;
          rec.iterations_used = ar.iterations_used;
          if (ar.succeeded && !rec.pre_misclassified) rec.adversarial = *ar.adversarial;
          camp.records.push_back(std::move(rec));
        }
      }
      run.fold_models.push_back(std::move(tfm));
    }
    camp.targets.push_back(std::move(run));
  }
  return camp;
}

inline AttackCampaign run_attack_campaign(const ExperimentConfig& config) {
  if (config.dataset_path.empty()) throw config_error("dataset_path is required");
  Dataset raw;
  try {
    raw = load_csv(config.dataset_path);
  } catch (const std::exception& e) {
    throw config_error(e.what());
  }
  return run_attack_campaign(config, raw);
}

// ---------------------------------------------------------------------------
// Security report (accuracy / distortion / score per feature count).
// ---------------------------------------------------------------------------

struct NormAggregate {
  double raw_mean = 0.0;         // mean gamma_min over crafted successes
  double normalized_mean = 0.0;  // mean normalized distance over crafted successes
  double success_rate = 0.0;     // successes / attempts, pre-misclassified excluded
  int attempted = 0;
  int succeeded = 0;
  int skipped_misclassified = 0;
};

struct SecurityRow {
  int feature_count = 0;  // target
  double achieved_feature_count = 0.0;
  double lambda = 0.0;
  double accuracy = 0.0;
  std::map<Norm, NormAggregate> per_norm;
  double security_score = 0.0;
  std::string diagnostic;
};

struct SecurityReport {
  int schema_version = 1;
  std::string dataset;
  nlohmann::json config;
  std::vector<SecurityRow> rows;
};

inline SecurityReport build_security_report(const AttackCampaign& camp) {
  SecurityReport rep;
  rep.dataset = camp.config.dataset_path;
  rep.config = config_to_json(camp.config);

  for (const TargetRun& run : camp.targets) {
    SecurityRow row;
    row.feature_count = run.target;
    row.lambda = run.lambda;
    row.diagnostic = run.diagnostic;

    double acc = 0.0, achieved = 0.0;
    for (const TargetFoldModel& fm : run.fold_models) {
      acc += fm.accuracy;
      achieved += fm.model.feature_count();
    }
    row.accuracy = acc / static_cast<double>(run.fold_models.size());
    row.achieved_feature_count = achieved / static_cast<double>(run.fold_models.size());

    std::map<Norm, double> normalized_means;
    for (Norm norm : camp.config.norms) {
      NormAggregate agg;
      // Per-fold means first, then an unweighted mean across folds.
      double raw_sum = 0.0, norm_sum = 0.0;
      int folds_with_successes = 0;
      for (int fold : camp.evaluated_folds) {
        double fold_raw = 0.0, fold_norm = 0.0;
        int fold_successes = 0;
        for (const AttackRecord& rec : camp.records) {
          if (rec.feature_count != run.target || rec.norm != norm || rec.fold != fold) continue;
          if (rec.pre_misclassified) {
            ++agg.skipped_misclassified;
            continue;
          }
          ++agg.attempted;
          if (!rec.succeeded) continue;
          ++agg.succeeded;
          ++fold_successes;
          fold_raw += rec.gamma_min;
          fold_norm += rec.normalized_distance;
        }
        if (fold_successes > 0) {
          raw_sum += fold_raw / fold_successes;
          norm_sum += fold_norm / fold_successes;
          ++folds_with_successes;
        }
      }
      if (folds_with_successes > 0) {
        agg.raw_mean = raw_sum / folds_with_successes;
        agg.normalized_mean = norm_sum / folds_with_successes;
      }
      agg.success_rate = agg.attempted > 0 ? static_cast<double>(agg.succeeded) / agg.attempted : 0.0;
      normalized_means[norm] = agg.normalized_mean;
      row.per_norm[norm] = agg;
    }
    row.security_score = security_score(normalized_means).value;

    // Cross-check on emission: the score must equal the mean of the
    // normalized per-norm columns.
    double check = 0.0;
    for (const auto& [norm, v] : normalized_means) check += v;
    check /= static_cast<double>(normalized_means.size());
    if (std::abs(check - row.security_score) > 1e-12)
      throw std::logic_error("security_score does not match the mean of normalized columns");

    rep.rows.push_back(std::move(row));
  }
  return rep;
}

inline SecurityReport run_security_evaluation(const ExperimentConfig& config) {
  return build_security_report(run_attack_campaign(config));
}

// ---------------------------------------------------------------------------
// MMD report (statistical detectability per feature count, norm and class).
// ---------------------------------------------------------------------------

struct MMDRow {
  int feature_count = 0;
  Norm norm = Norm::l2;
  int class_label = 0;
  double baseline_mmd = 0.0;
  double adversarial_mmd = 0.0;
  std::optional<double> ratio;  // adversarial / baseline, when baseline > 0
  int n_train = 0;
  int n_test = 0;
  int n_adversarial = 0;
};

struct MMDReport {
  int schema_version = 1;
  std::string dataset;
  nlohmann::json config;
  std::vector<MMDRow> rows;
};

namespace detail {

inline Eigen::MatrixXd rows_to_matrix(const std::vector<Eigen::VectorXd>& rows, Eigen::Index cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), cols);
  for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return out;
}

inline Eigen::MatrixXd select_columns(const Eigen::MatrixXd& m, const std::vector<int>& cols) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(cols[j]);
  return out;
}

}  // namespace detail

/// Per (feature count, norm, source class): the baseline MMD between clean
/// train and test samples of that class, against the MMD between clean train
/// samples and the crafted minimal adversarial samples. All sets are
/// restricted to the fold model's active features (the reduced model defines
/// the space both attacks and detectors operate in). Estimates are averaged
/// over evaluated folds; cells with no adversarial samples are skipped with a
/// warning.
inline MMDReport run_mmd_analysis(const ExperimentConfig& config, const AttackCampaign& camp) {
  MMDReport rep;
  rep.dataset = config.dataset_path;
  rep.config = config_to_json(config);

  for (const TargetRun& run : camp.targets) {
    for (Norm norm : config.norms) {
      for (int cls = 0; cls < 2; ++cls) {
        double base_sum = 0.0, adv_sum = 0.0;
        int folds_used = 0, n_train = 0, n_test = 0, n_adv = 0;
        for (size_t fi = 0; fi < camp.evaluated_folds.size(); ++fi) {
          const int fold = camp.evaluated_folds[fi];
          const TargetFoldModel& fm = run.fold_models[fi];
          std::vector<int> active;
          for (int j = 0; j < fm.model.dim(); ++j)
            if (fm.model.active_mask[static_cast<size_t>(j)]) active.push_back(j);
          if (active.empty()) continue;

          std::vector<int> train_rows, test_rows;
          for (int i : camp.folds.train_indices(fold))
            if (camp.data.labels[static_cast<size_t>(i)] == cls) train_rows.push_back(i);
          for (int i : camp.folds.test_indices(fold))
            if (camp.data.labels[static_cast<size_t>(i)] == cls) test_rows.push_back(i);

          std::vector<Eigen::VectorXd> adv;
          for (const AttackRecord& rec : camp.records)
            if (rec.feature_count == run.target && rec.norm == norm && rec.fold == fold &&
                rec.source_class == cls && rec.succeeded && !rec.pre_misclassified)
              adv.push_back(rec.adversarial);

          if (train_rows.empty() || test_rows.empty() || adv.empty()) continue;

          Eigen::MatrixXd train_m(static_cast<Eigen::Index>(train_rows.size()), camp.data.features.cols());
          for (size_t r = 0; r < train_rows.size(); ++r) train_m.row(static_cast<Eigen::Index>(r)) = camp.data.features.row(train_rows[r]);
          Eigen::MatrixXd test_m(static_cast<Eigen::Index>(test_rows.size()), camp.data.features.cols());
          for (size_t r = 0; r < test_rows.size(); ++r) test_m.row(static_cast<Eigen::Index>(r)) = camp.data.features.row(test_rows[r]);
          const Eigen::MatrixXd adv_m = detail::rows_to_matrix(adv, camp.data.features.cols());

          const MMDClassRow cell = mmd_analysis_class(detail::select_columns(train_m, active),
                                                      detail::select_columns(test_m, active),
                                                      detail::select_columns(adv_m, active), cls, norm);
          base_sum += cell.baseline.value;
          adv_sum += cell.adversarial.value;
          n_train += cell.baseline.n;
          n_test += cell.baseline.m;
          n_adv += cell.adversarial.m;
          ++folds_used;
        }
        if (folds_used == 0) {
          log_warn("mmd: no adversarial samples for target " + std::to_string(run.target) + " norm " +
                   to_string(norm) + " class " + std::to_string(cls) + ", row skipped");
          continue;
        }
        MMDRow row;
        row.feature_count = run.target;
        row.norm = norm;
        row.class_label = cls;
        row.baseline_mmd = base_sum / folds_used;
        row.adversarial_mmd = adv_sum / folds_used;
        if (row.baseline_mmd > 0.0) row.ratio = row.adversarial_mmd / row.baseline_mmd;
        row.n_train = n_train;
        row.n_test = n_test;
        row.n_adversarial = n_adv;
        rep.rows.push_back(row);
      }
    }
  }
  return rep;
}

inline MMDReport run_mmd_analysis(const ExperimentConfig& config) {
  return run_mmd_analysis(config, run_attack_campaign(config));
}

// ---------------------------------------------------------------------------
// Report emission: JSON (single document) and CSV (fixed schema width).
// ---------------------------------------------------------------------------

enum class ReportFormat { json, csv };

inline ReportFormat parse_report_format(const std::string& s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  throw config_error("unknown report format '" + s + "' (expected json or csv)");
}

inline nlohmann::json report_to_json(const SecurityReport& rep) {
  nlohmann::json j;
  j["schema_version"] = rep.schema_version;
  j["kind"] = "security_report";
  j["dataset"] = rep.dataset;
  j["config"] = rep.config;
  j["rows"] = nlohmann::json::array();
  for (const SecurityRow& row : rep.rows) {
    nlohmann::json r;
    r["feature_count"] = row.feature_count;
    r["achieved_feature_count"] = row.achieved_feature_count;
    r["lambda"] = row.lambda;
    r["accuracy"] = row.accuracy;
    r["security_score"] = row.security_score;
    r["diagnostic"] = row.diagnostic;
    nlohmann::json per;
    for (const auto& [norm, agg] : row.per_norm) {
      per[to_string(norm)] = {{"raw_mean", agg.raw_mean},
                              {"normalized_mean", agg.normalized_mean},
                              {"success_rate", agg.success_rate},
                              {"attempted", agg.attempted},
                              {"succeeded", agg.succeeded},
                              {"skipped_misclassified", agg.skipped_misclassified}};
    }
    r["per_norm"] = per;
    j["rows"].push_back(r);
  }
  return j;
}

inline nlohmann::json report_to_json(const MMDReport& rep) {
  nlohmann::json j;
  j["schema_version"] = rep.schema_version;
  j["kind"] = "mmd_report";
  j["dataset"] = rep.dataset;
  j["config"] = rep.config;
  j["rows"] = nlohmann::json::array();
  for (const MMDRow& row : rep.rows) {
    nlohmann::json r;
    r["feature_count"] = row.feature_count;
    r["norm"] = to_string(row.norm);
    r["class"] = row.class_label;
    r["baseline_mmd"] = row.baseline_mmd;
    r["adversarial_mmd"] = row.adversarial_mmd;
    if (row.ratio)
      r["ratio"] = *row.ratio;
    else
      r["ratio"] = nullptr;
    r["n_train"] = row.n_train;
    r["n_test"] = row.n_test;
    r["n_adversarial"] = row.n_adversarial;
    j["rows"].push_back(r);
  }
  return j;
}

namespace detail {

inline void write_text_file(const std::string& text, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw config_error("write failed for '" + path + "'");
}

}  // namespace detail

/// CSV with one row per feature count. Columns for all three norms are always
/// present so every report has the same width; norms missing from the run
/// stay empty.
inline std::string security_report_to_csv(const SecurityReport& rep) {
  std::string out =
      "feature_count,achieved_feature_count,lambda,accuracy"
      ",l1_raw_mean,l1_normalized_mean,l1_success_rate"
      ",l2_raw_mean,l2_normalized_mean,l2_success_rate"
      ",linf_raw_mean,linf_normalized_mean,linf_success_rate"
      ",security_score,diagnostic\n";
  for (const SecurityRow& row : rep.rows) {
    out += std::to_string(row.feature_count);
    out += ',' + detail::format_double(row.achieved_feature_count);
    out += ',' + detail::format_double(row.lambda);
    out += ',' + detail::format_double(row.accuracy);
    for (Norm norm : kAllNorms) {
      auto it = row.per_norm.find(norm);
      if (it == row.per_norm.end()) {
        out += ",,,";
      } else {
        out += ',' + detail::format_double(it->second.raw_mean);
        out += ',' + detail::format_double(it->second.normalized_mean);
        out += ',' + detail::format_double(it->second.success_rate);
      }
    }
    out += ',' + detail::format_double(row.security_score);
    out += ',' + row.diagnostic + '\n';
  }
  return out;
}

inline std::string mmd_report_to_csv(const MMDReport& rep) {
  std::string out = "feature_count,norm,class,baseline_mmd,adversarial_mmd,ratio,n_train,n_test,n_adversarial\n";
  for (const MMDRow& row : rep.rows) {
    out += std::to_string(row.feature_count);
    out += ',' + to_string(row.norm);
    out += ',' + std::to_string(row.class_label);
    out += ',' + detail::format_double(row.baseline_mmd);
    out += ',' + detail::format_double(row.adversarial_mmd);
    out += ',';
    if (row.ratio) out += detail::format_double(*row.ratio);
    out += ',' + std::to_string(row.n_train);
    out += ',' + std::to_string(row.n_test);
    out += ',' + std::to_string(row.n_adversarial) + '\n';
  }
  return out;
}

inline void emit_report(const SecurityReport& rep, ReportFormat format, const std::string& path) {
  if (format == ReportFormat::json)
    detail::write_text_file(report_to_json(rep).dump(2) + "\n", path);
  else
    detail::write_text_file(security_report_to_csv(rep), path);
}

inline void emit_report(const MMDReport& rep, ReportFormat format, const std::string& path) {
  if (format == ReportFormat::json)
    detail::write_text_file(report_to_json(rep).dump(2) + "\n", path);
  else
    detail::write_text_file(mmd_report_to_csv(rep), path);
}

/// Attack campaign results as JSON lines, one record per attacked sample.
inline nlohmann::json attack_record_to_json(const AttackRecord& rec) {
  nlohmann::json j;
  j["source_index"] = rec.sample_index;
  if (rec.fold >= 0) j["fold"] = rec.fold;
  if (rec.feature_count > 0) j["feature_count"] = rec.feature_count;
  j["norm"] = to_string(rec.norm);
  j["source_class"] = rec.source_class;
  j["gamma_min"] = rec.gamma_min;
  j["normalized_distance"] = rec.normalized_distance;
  j["succeeded"] = rec.succeeded;
  j["pre_misclassified"] = rec.pre_misclassified;
  j["iterations_used"] = rec.iterations_used;
  return j;
}

inline void write_attack_records_jsonl(const std::vector<AttackRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write '" + path + "'");
  for (const AttackRecord& rec : records) out << attack_record_to_json(rec).dump() << '\n';
  if (!out) throw config_error("write failed for '" + path + "'");
}

}  // namespace sparsec
