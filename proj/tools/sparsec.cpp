// sparsec: security evaluation of sparse linear classifiers against
// minimal-perturbation evasion attacks.
//
// Subcommands: synth, convert-mnist, train, attack, evaluate, mmd, report.
// Exit codes: 0 success, 1 config/data error, 2 experiment-level failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sparsec/attack.hpp"
#include "sparsec/dataset.hpp"
#include "sparsec/log.hpp"
#include "sparsec/metrics.hpp"
#include "sparsec/mnist.hpp"
#include "sparsec/model.hpp"
#include "sparsec/model_io.hpp"
#include "sparsec/pipeline.hpp"

namespace {

using namespace sparsec;

Dataset load_dataset_checked(const std::string& path) {
  try {
    return load_csv(path);
  } catch (const std::exception& e) {
    throw config_error(e.what());
  }
}

LinearModel load_model_checked(const std::string& path) {
  try {
    return load_model(path);
  } catch (const std::exception& e) {
    throw config_error(e.what());
  }
}

std::vector<Norm> parse_norm_list(const std::string& csv) {
  std::vector<Norm> norms;
  std::string cur;
  for (char c : csv + ",") {
    if (c == ',') {
      if (!cur.empty()) norms.push_back(parse_norm(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (norms.empty()) throw config_error("empty norm list");
  return norms;
}

struct SynthArgs {
  std::string out;
  int n_per_class = 10;
  uint64_t seed = 1;
  int features = 2;
  int informative = 20;
  bool normalize = false;
};

void cmd_synth(const SynthArgs& a) {
  Dataset ds;
  if (a.features <= 2) {
    ds = gen_synthetic(a.n_per_class, a.seed);
  } else {
    SyntheticWideParams p;
    p.n_per_class = a.n_per_class;
    p.n_features = a.features;
    p.n_informative = a.informative;
    ds = gen_synthetic_wide(p, a.seed);
  }
  if (a.normalize) ds = normalize_minmax(ds);
  save_csv(ds, a.out);
  log_info("wrote " + std::to_string(ds.n()) + " samples x " + std::to_string(ds.feature_count()) +
           " features to " + a.out);
}

struct ConvertArgs {
  std::string images, labels, out;
};

void cmd_convert_mnist(const ConvertArgs& a) {
  const Dataset ds = mnist_to_dataset(a.images, a.labels);
  save_csv(ds, a.out);
  log_info("extracted " + std::to_string(ds.n()) + " samples (7 -> class 1, 9 -> class 0) to " + a.out);
}

struct TrainArgs {
  std::string data, out;
  std::string reg = "l1";
  double lambda = 0.0;
  std::optional<int> target_features;
  double threshold = 0.01;
  TrainConfig cfg;
  bool no_normalize = false;
};

void cmd_train(const TrainArgs& a) {
  Dataset ds = load_dataset_checked(a.data);
  if (!a.no_normalize) ds = normalize_minmax(ds);
  const RegKind reg = parse_reg_kind(a.reg);
  LinearModel model;
  if (a.target_features) {
    const auto results = lambda_search(ds, {*a.target_features}, a.cfg, a.threshold, reg);
    const LambdaSearchResult& res = results.at(*a.target_features);
    if (!res.converged)
      throw experiment_error("lambda search missed target " + std::to_string(*a.target_features) +
                             ", nearest achieved count " + std::to_string(res.achieved_count));
    model = res.model;
    log_info("lambda " + std::to_string(res.lambda) + " gives " + std::to_string(res.achieved_count) +
             " features");
  } else {
    model = sparsify(train(ds, reg, a.lambda, a.cfg), a.threshold);
  }
  save_model(model, a.out);
  log_info("model with " + std::to_string(model.feature_count()) + "/" + std::to_string(model.dim()) +
           " active features -> " + a.out);
}

struct AttackArgs {
  std::string data, model, out;
  std::string norms = "l1,l2,linf";
  std::optional<int> sample_cap;
  uint64_t seed = 42;
  AttackConfig cfg;
  bool no_normalize = false;
  bool no_box_clamp = false;
};

void cmd_attack(const AttackArgs& a) {
  Dataset ds = load_dataset_checked(a.data);
  if (!a.no_normalize) ds = normalize_minmax(ds);
  const LinearModel model = load_model_checked(a.model);
  if (model.dim() != ds.feature_count())
    throw config_error("model expects " + std::to_string(model.dim()) + " features, dataset has " +
                       std::to_string(ds.feature_count()));

  std::vector<int> indices(static_cast<size_t>(ds.n()));
  std::iota(indices.begin(), indices.end(), 0);
  if (a.sample_cap && static_cast<int>(indices.size()) > *a.sample_cap) {
    std::mt19937_64 rng(a.seed);
    std::shuffle(indices.begin(), indices.end(), rng);
    indices.resize(static_cast<size_t>(*a.sample_cap));
    std::sort(indices.begin(), indices.end());
  }

  AttackConfig cfg = a.cfg;
  cfg.box_clamp = !a.no_box_clamp;
  const int fc = model.feature_count();
  std::vector<AttackRecord> records;
  for (Norm norm : parse_norm_list(a.norms)) {
    cfg.norm = norm;
    for (int idx : indices) {
      const Eigen::VectorXd x = ds.features.row(idx).transpose();
      const int y = ds.labels[static_cast<size_t>(idx)];
      const AttackResult ar = minimal_attack(model, x, y, cfg);
      AttackRecord rec;
      rec.sample_index = idx;
      rec.feature_count = fc;
      rec.norm = norm;
      rec.source_class = y;
      rec.pre_misclassified = ar.succeeded && ar.gamma_min == 0.0;
      rec.succeeded = ar.succeeded;
      rec.gamma_min = ar.gamma_min;
      rec.normalized_distance = fc > 0 ? normalized_distance(ar.gamma_min, fc, norm) : 0.0;
      rec.iterations_used = ar.iterations_used;
      records.push_back(std::move(rec));
    }
  }
  write_attack_records_jsonl(records, a.out);
  log_info("wrote " + std::to_string(records.size()) + " attack records to " + a.out);
}

struct EvaluateArgs {
  std::string config_path;
  std::string out;
  std::string mmd_out;
  std::string format = "json";
  // flag overrides; only applied when the flag was passed
  CLI::App* sub = nullptr;
  std::string dataset;
  std::vector<int> counts;
  std::string norms;
  int k_folds = 0;
  double threshold = 0.0;
  uint64_t seed = 0;
  int sample_cap = 0;
  int fold_cap = 0;
  double lr = 0.0;
  int epochs = 0;
};

ExperimentConfig effective_config(const EvaluateArgs& a) {
  ExperimentConfig cfg;
  if (!a.config_path.empty()) cfg = load_config(a.config_path);
  const auto passed = [&](const std::string& flag) { return a.sub && a.sub->count(flag) > 0; };
  if (passed("--data")) cfg.dataset_path = a.dataset;
  if (passed("--counts")) cfg.target_feature_counts = a.counts;
  if (passed("--norms")) cfg.norms = parse_norm_list(a.norms);
  if (passed("--k-folds")) cfg.k_folds = a.k_folds;
  if (passed("--threshold")) cfg.sparsify_threshold = a.threshold;
  if (passed("--seed")) cfg.seed = a.seed;
  if (passed("--sample-cap")) cfg.sample_cap = a.sample_cap;
  if (passed("--fold-cap")) cfg.fold_cap = a.fold_cap;
  if (passed("--lr")) cfg.train.learning_rate = a.lr;
  if (passed("--epochs")) cfg.train.epochs = a.epochs;
  return cfg;
}

void cmd_evaluate(const EvaluateArgs& a) {
  const ExperimentConfig cfg = effective_config(a);
  const AttackCampaign camp = run_attack_campaign(cfg);
  const SecurityReport rep = build_security_report(camp);
  emit_report(rep, parse_report_format(a.format), a.out);
  log_info("security report -> " + a.out);
  if (!a.mmd_out.empty()) {
    const MMDReport mmd = run_mmd_analysis(cfg, camp);
    emit_report(mmd, parse_report_format(a.format), a.mmd_out);
    log_info("mmd report -> " + a.mmd_out);
  }
}

void cmd_mmd(const EvaluateArgs& a) {
  const ExperimentConfig cfg = effective_config(a);
  const MMDReport rep = run_mmd_analysis(cfg);
  emit_report(rep, parse_report_format(a.format), a.out);
  log_info("mmd report -> " + a.out);
}

struct ReportArgs {
  std::string in, out;
  std::string format = "csv";
};

void cmd_report(const ReportArgs& a) {
  std::ifstream in(a.in);
  if (!in) throw config_error("cannot open '" + a.in + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(a.in + ": invalid JSON: " + e.what());
  }
  const std::string kind = j.value("kind", "");
  const ReportFormat fmt = parse_report_format(a.format);
  if (fmt == ReportFormat::json) {
    detail::write_text_file(j.dump(2) + "\n", a.out);
    return;
  }
  if (kind == "security_report") {
    SecurityReport rep;
    rep.dataset = j.value("dataset", "");
    rep.config = j.value("config", nlohmann::json::object());
    for (const auto& r : j.at("rows")) {
      SecurityRow row;
      row.feature_count = r.at("feature_count").get<int>();
      row.achieved_feature_count = r.at("achieved_feature_count").get<double>();
      row.lambda = r.at("lambda").get<double>();
      row.accuracy = r.at("accuracy").get<double>();
      row.security_score = r.at("security_score").get<double>();
      row.diagnostic = r.value("diagnostic", "");
      for (const auto& [key, agg] : r.at("per_norm").items()) {
        NormAggregate na;
        na.raw_mean = agg.at("raw_mean").get<double>();
        na.normalized_mean = agg.at("normalized_mean").get<double>();
        na.success_rate = agg.at("success_rate").get<double>();
        na.attempted = agg.value("attempted", 0);
        na.succeeded = agg.value("succeeded", 0);
        na.skipped_misclassified = agg.value("skipped_misclassified", 0);
        row.per_norm[parse_norm(key)] = na;
      }
      rep.rows.push_back(std::move(row));
    }
    detail::write_text_file(security_report_to_csv(rep), a.out);
  } else if (kind == "mmd_report") {
    MMDReport rep;
    rep.dataset = j.value("dataset", "");
    for (const auto& r : j.at("rows")) {
      MMDRow row;
      row.feature_count = r.at("feature_count").get<int>();
      row.norm = parse_norm(r.at("norm").get<std::string>());
      row.class_label = r.at("class").get<int>();
      row.baseline_mmd = r.at("baseline_mmd").get<double>();
      row.adversarial_mmd = r.at("adversarial_mmd").get<double>();
      if (!r.at("ratio").is_null()) row.ratio = r.at("ratio").get<double>();
      row.n_train = r.value("n_train", 0);
      row.n_test = r.value("n_test", 0);
      row.n_adversarial = r.value("n_adversarial", 0);
      rep.rows.push_back(row);
    }
    detail::write_text_file(mmd_report_to_csv(rep), a.out);
  } else {
    throw config_error(a.in + ": unknown report kind '" + kind + "'");
  }
}

void add_attack_flags(CLI::App* sub, AttackConfig& cfg) {
  sub->add_option("--step-size", cfg.step_size, "step length as a fraction of the budget");
  sub->add_option("--max-iterations", cfg.max_iterations, "inner attack iteration cap");
  sub->add_option("--gamma-upper", cfg.gamma_upper_init, "initial binary-search upper bound");
  sub->add_option_function<double>(
      "--tolerance", [&cfg](double v) { cfg.binary_search_tolerance = v; },
      "absolute binary-search budget tolerance (default 1e-3 * f^(1/p))");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robustness evaluation of sparse linear classifiers against minimal evasion attacks"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth", "generate a synthetic dataset CSV");
  s_synth->add_option("--out", synth.out, "output CSV path")->required();
  s_synth->add_option("--n-per-class", synth.n_per_class, "samples per class");
  s_synth->add_option("--seed", synth.seed, "generator seed");
  s_synth->add_option("--features", synth.features, "feature count (2 = two-feature toy set)");
  s_synth->add_option("--informative", synth.informative, "informative features (wide generator)");
  s_synth->add_flag("--normalize", synth.normalize, "min-max normalize before writing");

  ConvertArgs conv;
  auto* s_conv = app.add_subcommand("convert-mnist", "extract the 7-vs-9 subset from IDX files");
  s_conv->add_option("--images", conv.images, "IDX image file")->required();
  s_conv->add_option("--labels", conv.labels, "IDX label file")->required();
  s_conv->add_option("--out", conv.out, "output CSV path")->required();

  TrainArgs train_args;
  auto* s_train = app.add_subcommand("train", "train a logistic-regression model");
  s_train->add_option("--data", train_args.data, "dataset CSV")->required();
  s_train->add_option("--out", train_args.out, "output model JSON")->required();
  s_train->add_option("--reg", train_args.reg, "regularizer: none, l1 or l2");
  s_train->add_option("--lambda", train_args.lambda, "regularization strength");
  s_train->add_option_function<int>(
      "--target-features", [&train_args](int v) { train_args.target_features = v; },
      "search lambda for this feature count instead of using --lambda");
  s_train->add_option("--threshold", train_args.threshold, "sparsification threshold");
  s_train->add_option("--lr", train_args.cfg.learning_rate, "learning rate");
  s_train->add_option("--epochs", train_args.cfg.epochs, "training epochs");
  s_train->add_option("--seed", train_args.cfg.seed, "training seed");
  s_train->add_flag("--no-normalize", train_args.no_normalize, "skip min-max normalization");

  AttackArgs attack_args;
  auto* s_attack = app.add_subcommand("attack", "run minimal attacks against a saved model");
  s_attack->add_option("--data", attack_args.data, "dataset CSV")->required();
  s_attack->add_option("--model", attack_args.model, "model JSON")->required();
  s_attack->add_option("--out", attack_args.out, "output JSONL path")->required();
  s_attack->add_option("--norms", attack_args.norms, "comma-separated norms (l1,l2,linf)");
  s_attack->add_option_function<int>(
      "--sample-cap", [&attack_args](int v) { attack_args.sample_cap = v; }, "max samples attacked");
  s_attack->add_option("--seed", attack_args.seed, "sampling seed");
  s_attack->add_flag("--no-normalize", attack_args.no_normalize, "skip min-max normalization");
  s_attack->add_flag("--no-box-clamp", attack_args.no_box_clamp, "do not clamp iterates to [0,1]");
  add_attack_flags(s_attack, attack_args.cfg);

  EvaluateArgs eval_args;
  auto* s_eval = app.add_subcommand("evaluate", "full cross-validated security evaluation");
  s_eval->add_option("--config", eval_args.config_path, "experiment config JSON");
  s_eval->add_option("--out", eval_args.out, "security report path")->required();
  s_eval->add_option("--mmd-out", eval_args.mmd_out, "also emit the MMD report here");
  s_eval->add_option("--format", eval_args.format, "json or csv");
  s_eval->add_option("--data", eval_args.dataset, "dataset CSV (overrides config)");
  s_eval->add_option("--counts", eval_args.counts, "target feature counts (overrides config)");
  s_eval->add_option("--norms", eval_args.norms, "comma-separated norms (overrides config)");
  s_eval->add_option("--k-folds", eval_args.k_folds, "fold count (overrides config)");
  s_eval->add_option("--threshold", eval_args.threshold, "sparsification threshold (overrides config)");
  s_eval->add_option("--seed", eval_args.seed, "experiment seed (overrides config)");
  s_eval->add_option("--sample-cap", eval_args.sample_cap, "attacked samples per fold (overrides config)");
  s_eval->add_option("--fold-cap", eval_args.fold_cap, "folds to evaluate (overrides config)");
  s_eval->add_option("--lr", eval_args.lr, "learning rate (overrides config)");
  s_eval->add_option("--epochs", eval_args.epochs, "training epochs (overrides config)");
  eval_args.sub = s_eval;

  EvaluateArgs mmd_args;
  auto* s_mmd = app.add_subcommand("mmd", "statistical detectability (MMD) analysis");
  s_mmd->add_option("--config", mmd_args.config_path, "experiment config JSON");
  s_mmd->add_option("--out", mmd_args.out, "MMD report path")->required();
  s_mmd->add_option("--format", mmd_args.format, "json or csv");
  s_mmd->add_option("--data", mmd_args.dataset, "dataset CSV (overrides config)");
  s_mmd->add_option("--counts", mmd_args.counts, "target feature counts (overrides config)");
  s_mmd->add_option("--norms", mmd_args.norms, "comma-separated norms (overrides config)");
  s_mmd->add_option("--k-folds", mmd_args.k_folds, "fold count (overrides config)");
  s_mmd->add_option("--threshold", mmd_args.threshold, "sparsification threshold (overrides config)");
  s_mmd->add_option("--seed", mmd_args.seed, "experiment seed (overrides config)");
  s_mmd->add_option("--sample-cap", mmd_args.sample_cap, "attacked samples per fold (overrides config)");
  s_mmd->add_option("--fold-cap", mmd_args.fold_cap, "folds to evaluate (overrides config)");
  s_mmd->add_option("--lr", mmd_args.lr, "learning rate (overrides config)");
  s_mmd->add_option("--epochs", mmd_args.epochs, "training epochs (overrides config)");
  mmd_args.sub = s_mmd;

  ReportArgs report_args;
  auto* s_report = app.add_subcommand("report", "convert a JSON report to CSV (or re-emit JSON)");
  s_report->add_option("--in", report_args.in, "input report JSON")->required();
  s_report->add_option("--out", report_args.out, "output path")->required();
  s_report->add_option("--format", report_args.format, "json or csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*s_synth) cmd_synth(synth);
    if (*s_conv) cmd_convert_mnist(conv);
    if (*s_train) cmd_train(train_args);
    if (*s_attack) cmd_attack(attack_args);
    if (*s_eval) cmd_evaluate(eval_args);
    if (*s_mmd) cmd_mmd(mmd_args);
    if (*s_report) cmd_report(report_args);
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const experiment_error& e) {
    std::cerr << "experiment failed: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    // data errors surface before any experiment state exists
    std::cerr << "error: " << e.what() << "\n";
    return *s_eval || *s_mmd || *s_attack || *s_train ? 2 : 1;
  }
  return 0;
}
