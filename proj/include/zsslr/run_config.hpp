#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zsslr/class_embed.hpp"
#include "zsslr/compatibility.hpp"
#include "zsslr/error.hpp"
#include "zsslr/lle.hpp"
#include "zsslr/temporal_agg.hpp"

namespace zsslr {

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "ZSSLR_OUTPUT_ROOT";

/// Everything one experiment run needs. Built from a JSON document; CLI flags
/// are merged into that document before conversion so both routes share the
/// same validation.
struct RunConfig {
  std::filesystem::path dataset;
  AggregatorSpec aggregator;
  bool use_hand = false;
  EmbeddingMode embedding;
  Method method = Method::LLE;
  TrainConfig train;
  double gamma = 1e-3;
  double lambda_sae = 1e-3;
  std::vector<int> ks{1, 2, 5};
  std::filesystem::path output_dir;
  int repeats = 5;
  double gzsl_holdout = 0.2;  // fraction of each seen class held out for GZSL testing
  std::size_t baseline_trials = 10000;
};

inline nlohmann::json default_config_json() {
  return {{"dataset", ""},
          {"aggregator", "avgpool"},
          {"tsm_weights", {0.0, 1.0, 0.0}},
          {"use_hand", false},
          {"embedding", "attr"},
          {"d_t", 64},
          {"method", "lle"},
          {"lambda", 1e-3},
          {"gamma", 1e-3},
          {"lambda_sae", 1e-3},
          {"learning_rate", 1e-2},
          {"epochs", 1000},
          {"seed", 0},
          {"init_scale", 1e-3},
          {"ks", {1, 2, 5}},
          {"output_dir", ""},
          {"repeats", 5},
          {"gzsl_holdout", 0.2},
          {"baseline_trials", 10000}};
}

namespace detail {
template <typename T>
T config_value(const nlohmann::json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::InvalidConfig, std::string("config field \"") + key + "\" is missing or has the wrong type");
  }
}
}  // namespace detail

/// Reads a config file and overlays it onto the defaults. Relative "dataset"
/// and "output_dir" paths are resolved against the config file's directory.
inline nlohmann::json read_config_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, path.string() + ": config must be a JSON object");
  nlohmann::json merged = default_config_json();
  for (const auto& [key, value] : doc.items()) {
    if (!merged.contains(key)) throw Error(ErrorKind::InvalidConfig, "unknown config field \"" + key + "\"");
    merged[key] = value;
  }
  for (const char* key : {"dataset", "output_dir"}) {
    const std::string p = merged[key].is_string() ? merged[key].get<std::string>() : "";
    if (!p.empty() && std::filesystem::path(p).is_relative())
      merged[key] = (path.parent_path() / p).lexically_normal().string();
  }
  return merged;
}

inline RunConfig config_from_json(const nlohmann::json& doc) {
  using detail::config_value;
  RunConfig c;
  c.dataset = config_value<std::string>(doc, "dataset");

  const auto agg = config_value<std::string>(doc, "aggregator");
  const auto w = config_value<std::vector<double>>(doc, "tsm_weights");
  if (w.size() != 3) throw Error(ErrorKind::InvalidConfig, "tsm_weights needs exactly 3 values");
  for (double v : w)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidConfig, "tsm_weights must be finite");
  if (agg == "avgpool")
    c.aggregator = AggregatorSpec::average();
  else if (agg == "tsm")
    c.aggregator = AggregatorSpec::temporal_shift(w[0], w[1], w[2]);
  else
    throw Error(ErrorKind::InvalidConfig, "aggregator must be avgpool or tsm, got \"" + agg + "\"");
  c.use_hand = config_value<bool>(doc, "use_hand");

  c.embedding.kind = embedding_kind_from_string(config_value<std::string>(doc, "embedding"));
  c.embedding.text_dim = config_value<Eigen::Index>(doc, "d_t");
  if (c.embedding.text_dim < 1) throw Error(ErrorKind::InvalidConfig, "d_t must be >= 1");
  c.method = method_from_string(config_value<std::string>(doc, "method"));

  c.train.lambda = config_value<double>(doc, "lambda");
  c.train.learning_rate = config_value<double>(doc, "learning_rate");
  c.train.epochs = config_value<int>(doc, "epochs");
  c.train.seed = config_value<std::uint64_t>(doc, "seed");
  c.train.init_scale = config_value<double>(doc, "init_scale");
  c.gamma = config_value<double>(doc, "gamma");
  c.lambda_sae = config_value<double>(doc, "lambda_sae");
  if (c.train.lambda < 0.0 || !(c.train.learning_rate > 0.0) || c.train.epochs < 1 || c.gamma < 0.0 ||
      !(c.lambda_sae > 0.0) || c.train.init_scale < 0.0)
    throw Error(ErrorKind::InvalidConfig,
                "need lambda >= 0, gamma >= 0, lambda_sae > 0, learning_rate > 0, epochs >= 1, init_scale >= 0");

  c.ks = config_value<std::vector<int>>(doc, "ks");
  if (c.ks.empty()) throw Error(ErrorKind::InvalidConfig, "ks must be non-empty");
  for (int k : c.ks)
    if (k < 1) throw Error(ErrorKind::InvalidConfig, "ks must be positive");

  c.output_dir = config_value<std::string>(doc, "output_dir");
  c.repeats = config_value<int>(doc, "repeats");
  if (c.repeats < 1) throw Error(ErrorKind::InvalidConfig, "repeats must be >= 1");
  c.gzsl_holdout = config_value<double>(doc, "gzsl_holdout");
  if (!(c.gzsl_holdout > 0.0 && c.gzsl_holdout < 1.0))
    throw Error(ErrorKind::InvalidConfig, "gzsl_holdout must be in (0, 1)");
  c.baseline_trials = config_value<std::size_t>(doc, "baseline_trials");
  if (c.baseline_trials < 1) throw Error(ErrorKind::InvalidConfig, "baseline_trials must be >= 1");
  return c;
}

inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json doc = default_config_json();
  doc["dataset"] = c.dataset.string();
  doc["aggregator"] = c.aggregator.kind == AggregatorKind::AveragePool ? "avgpool" : "tsm";
  doc["tsm_weights"] = {c.aggregator.weights[0], c.aggregator.weights[1], c.aggregator.weights[2]};
  doc["use_hand"] = c.use_hand;
  doc["embedding"] = to_string(c.embedding.kind);
  doc["d_t"] = c.embedding.text_dim;
  doc["method"] = to_string(c.method);
  doc["lambda"] = c.train.lambda;
  doc["gamma"] = c.gamma;
  doc["lambda_sae"] = c.lambda_sae;
  doc["learning_rate"] = c.train.learning_rate;
  doc["epochs"] = c.train.epochs;
  doc["seed"] = c.train.seed;
  doc["init_scale"] = c.train.init_scale;
  doc["ks"] = c.ks;
  doc["output_dir"] = c.output_dir.string();
  doc["repeats"] = c.repeats;
  doc["gzsl_holdout"] = c.gzsl_holdout;
  doc["baseline_trials"] = c.baseline_trials;
  return doc;
}

/// `configured` if set, else $ZSSLR_OUTPUT_ROOT/<command>, else runs/<command>.
inline std::filesystem::path resolve_output_dir(const std::filesystem::path& configured, const std::string& command) {
  if (!configured.empty()) return configured;
  const char* root = std::getenv(kOutputRootEnv);
  return std::filesystem::path(root && *root ? root : "runs") / command;
}

}  // namespace zsslr
