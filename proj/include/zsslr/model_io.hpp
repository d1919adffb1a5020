#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "zsslr/compatibility.hpp"
#include "zsslr/error.hpp"

namespace zsslr {

namespace detail {

inline nlohmann::json row_major(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

inline Matrix from_row_major(const nlohmann::json& arr, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != rows * cols)
    throw Error(ErrorKind::SchemaMismatch, std::string(name) + " must hold " + std::to_string(rows * cols) +
                                               " reals (" + std::to_string(rows) + "x" + std::to_string(cols) + ")");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& v = arr[static_cast<std::size_t>(r * cols + c)];
      if (!v.is_number()) throw Error(ErrorKind::SchemaMismatch, std::string(name) + " entries must be numbers");
      m(r, c) = v.get<double>();
    }
  return m;
}

template <typename T>
T field(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) throw Error(ErrorKind::SchemaMismatch, std::string("model file lacks \"") + key + "\"");
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::SchemaMismatch, std::string("model field \"") + key + "\" has the wrong type");
  }
}

}  // namespace detail

/// JSON form of a model. Reals are written in shortest round-trip form, so a
/// reload reproduces every entry bit for bit.
inline nlohmann::json model_to_json(const CompatModel& m) {
  nlohmann::json doc;
  doc["method"] = to_string(m.method);
  doc["mode"] = to_string(m.mode.kind);
  doc["d"] = m.W.rows();
  doc["t"] = m.W.cols();
  doc["d_text"] = m.raw_text_dim;
  doc["d_t"] = m.mode.text_dim;
  doc["W"] = detail::row_major(m.W);
  doc["M"] = m.reduction ? detail::row_major(m.reduction->matrix) : nlohmann::json(nullptr);
  doc["hyperparams"] = {{"lambda", m.hyperparams.lambda},
                        {"gamma", m.hyperparams.gamma},
                        {"lambda_sae", m.hyperparams.lambda_sae},
                        {"learning_rate", m.hyperparams.learning_rate},
                        {"init_scale", m.hyperparams.init_scale}};
  doc["seed"] = m.seed;
  doc["epochs"] = m.epochs;
  doc["final_loss"] = std::isfinite(m.final_loss) ? nlohmann::json(m.final_loss) : nlohmann::json(nullptr);
  return doc;
}

inline CompatModel model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::SchemaMismatch, "model file must be a JSON object");
  CompatModel m;
  try {
    m.method = method_from_string(detail::field<std::string>(doc, "method"));
    m.mode.kind = embedding_kind_from_string(detail::field<std::string>(doc, "mode"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SchemaMismatch) throw;
    throw Error(ErrorKind::SchemaMismatch, e.what());
  }
  const auto d = detail::field<Eigen::Index>(doc, "d");
  const auto t = detail::field<Eigen::Index>(doc, "t");
  m.raw_text_dim = detail::field<Eigen::Index>(doc, "d_text");
  m.mode.text_dim = detail::field<Eigen::Index>(doc, "d_t");
  if (d < 1 || t < 1 || m.raw_text_dim < 0 || m.mode.text_dim < 1)
    throw Error(ErrorKind::SchemaMismatch, "model dimensions must be positive");
  if (m.mode.kind == EmbeddingKind::TextOnly && t != m.mode.text_dim)
    throw Error(ErrorKind::SchemaMismatch, "text-only model needs t == d_t");
  if (m.mode.kind == EmbeddingKind::Combined && t <= m.mode.text_dim)
    throw Error(ErrorKind::SchemaMismatch, "combined model needs t > d_t");
  m.W = detail::from_row_major(detail::field<nlohmann::json>(doc, "W"), d, t, "W");

  const auto reduction = detail::field<nlohmann::json>(doc, "M");
  const bool needs_reduction = m.mode.reduces_text(m.raw_text_dim);
  if (reduction.is_null()) {
    if (needs_reduction) throw Error(ErrorKind::SchemaMismatch, "mode reduces text but \"M\" is null");
  } else {
    if (!m.mode.uses_text()) throw Error(ErrorKind::SchemaMismatch, "attribute-only model cannot carry \"M\"");
    m.reduction = ReductionMatrix{detail::from_row_major(reduction, m.raw_text_dim, m.mode.text_dim, "M")};
  }

  const auto hp = detail::field<nlohmann::json>(doc, "hyperparams");
  if (!hp.is_object()) throw Error(ErrorKind::SchemaMismatch, "\"hyperparams\" must be an object");
  m.hyperparams.lambda = hp.value("lambda", m.hyperparams.lambda);
  m.hyperparams.gamma = hp.value("gamma", m.hyperparams.gamma);
  m.hyperparams.lambda_sae = hp.value("lambda_sae", m.hyperparams.lambda_sae);
  m.hyperparams.learning_rate = hp.value("learning_rate", m.hyperparams.learning_rate);
  m.hyperparams.init_scale = hp.value("init_scale", m.hyperparams.init_scale);
  m.seed = detail::field<std::uint64_t>(doc, "seed");
  m.epochs = detail::field<int>(doc, "epochs");
  const auto loss = detail::field<nlohmann::json>(doc, "final_loss");
  m.final_loss = loss.is_number() ? loss.get<double>() : std::numeric_limits<double>::quiet_NaN();
  return m;
}

inline void save_model(const CompatModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << model_to_json(model).dump(2) << '\n';
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

inline CompatModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::SchemaMismatch, path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace zsslr
