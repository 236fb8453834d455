#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "sparsec/model.hpp"

namespace sparsec {

/// Model persistence schema:
///   {weights: [...], bias, lambda, reg_kind, threshold, active_mask: [...]}
/// Doubles round-trip at full precision.
inline nlohmann::json model_to_json(const LinearModel& m) {
  nlohmann::json j;
  j["weights"] = std::vector<double>(m.weights.data(), m.weights.data() + m.weights.size());
  j["bias"] = m.bias;
  j["lambda"] = m.lambda;
  j["reg_kind"] = to_string(m.reg_kind);
  j["threshold"] = m.sparsify_threshold;
  j["active_mask"] = m.active_mask;
  return j;
}

inline LinearModel model_from_json(const nlohmann::json& j) {
  LinearModel m;
  const auto weights = j.at("weights").get<std::vector<double>>();
  m.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  m.bias = j.at("bias").get<double>();
  m.lambda = j.at("lambda").get<double>();
  m.reg_kind = parse_reg_kind(j.at("reg_kind").get<std::string>());
  m.sparsify_threshold = j.at("threshold").get<double>();
  m.active_mask = j.at("active_mask").get<std::vector<bool>>();
  if (m.active_mask.size() != weights.size())
    throw std::runtime_error("model JSON: active_mask length does not match weights");
  for (size_t i = 0; i < m.active_mask.size(); ++i)
    if (!m.active_mask[i] && m.weights[static_cast<Eigen::Index>(i)] != 0.0)
      throw std::runtime_error("model JSON: masked weight " + std::to_string(i) + " is nonzero");
  return m;
}

inline void save_model(const LinearModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << model_to_json(m).dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

inline LinearModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": invalid model JSON: " + e.what());
  }
  return model_from_json(j);
}

}  // namespace sparsec
