#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "zsslr/class_embed.hpp"
#include "zsslr/closed_form.hpp"
#include "zsslr/compatibility.hpp"
#include "zsslr/data_model.hpp"
#include "zsslr/lle.hpp"
#include "zsslr/model_io.hpp"
#include "zsslr/temporal_agg.hpp"

namespace zsslr {

/// Video embeddings of `samples`, one row each.
inline Matrix embed_samples(std::span<const Sample* const> samples, const AggregatorSpec& spec, bool use_hand) {
  Matrix out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Vector v = embed_video(*samples[i], spec, use_hand).vector;
    if (i == 0) out.resize(static_cast<Eigen::Index>(samples.size()), v.size());
    if (v.size() != out.cols())
      throw Error(ErrorKind::DimensionMismatch, "sample " + samples[i]->sample_id + " embeds to " +
                                                    std::to_string(v.size()) + " entries, expected " +
                                                    std::to_string(out.cols()));
    out.row(static_cast<Eigen::Index>(i)) = v.transpose();
  }
  return out;
}

/// Everything a trainer needs: embedded training videos, their labels as
/// indices into `classes`, and the seen-class descriptors (ascending id).
struct TrainingSet {
  Matrix phi;
  std::vector<Eigen::Index> labels;
  std::vector<ClassDescriptor> classes;

  Matrix attribute_matrix() const {
    Matrix a(static_cast<Eigen::Index>(classes.size()), classes.empty() ? 0 : classes.front().attributes.size());
    for (std::size_t j = 0; j < classes.size(); ++j) a.row(static_cast<Eigen::Index>(j)) = classes[j].attributes;
    return a;
  }

  Matrix text_matrix() const {
    Matrix t(static_cast<Eigen::Index>(classes.size()), classes.empty() ? 0 : classes.front().text.size());
    for (std::size_t j = 0; j < classes.size(); ++j) t.row(static_cast<Eigen::Index>(j)) = classes[j].text;
    return t;
  }
};

inline TrainingSet make_training_set(const Dataset& data, std::span<const Sample* const> samples,
                                     const AggregatorSpec& spec, bool use_hand) {
  TrainingSet ts;
  ts.classes = data.descriptors(data.split.seen);
  if (ts.classes.size() < 2) throw Error(ErrorKind::DegenerateData, "need at least 2 seen classes");
  std::map<std::string, Eigen::Index> index;
  for (std::size_t j = 0; j < ts.classes.size(); ++j) index[ts.classes[j].class_id] = static_cast<Eigen::Index>(j);
  for (const Sample* s : samples) {
    auto it = index.find(s->class_id);
    if (it == index.end())
      throw Error(ErrorKind::DegenerateData, "training sample " + s->sample_id + " is not from a seen class");
    ts.labels.push_back(it->second);
  }
  if (samples.empty()) throw Error(ErrorKind::DegenerateData, "no training samples");
  ts.phi = embed_samples(samples, spec, use_hand);
  return ts;
}

struct TrainResult {
  CompatModel model;
  std::vector<double> loss_history;  // LLE only
};

inline TrainResult train_lle(const TrainingSet& ts, const EmbeddingMode& mode, const TrainConfig& cfg) {
  LleObjective objective(ts.phi, ts.labels, ts.attribute_matrix(), ts.text_matrix(), mode, cfg.lambda);
  auto r = train_lle(objective, cfg);
  return {std::move(r.model), std::move(r.loss_history)};
}

namespace detail {
inline void require_unreduced(const TrainingSet& ts, const EmbeddingMode& mode, const char* method) {
  const Eigen::Index raw = ts.classes.empty() ? 0 : ts.classes.front().text.size();
  if (mode.reduces_text(raw))
    throw Error(ErrorKind::InvalidConfig, std::string(method) + " has no trainable text reduction; set d_t = " +
                                              std::to_string(raw) + " to use the raw text vectors");
}
}  // namespace detail

inline TrainResult train_eszsl(const TrainingSet& ts, const EmbeddingMode& mode, double gamma, double lambda) {
  detail::require_unreduced(ts, mode, "ESZSL");
  const Matrix s = compose_matrix(ts.classes, mode, nullptr).transpose();  // t x C
  const Matrix y = signed_label_matrix(ts.labels, static_cast<Eigen::Index>(ts.classes.size()));
  TrainResult r;
  r.model.method = Method::ESZSL;
  r.model.mode = mode;
  r.model.raw_text_dim = ts.classes.front().text.size();
  r.model.W = eszsl_solve(ts.phi.transpose(), y, s, gamma, lambda);
  r.model.hyperparams.gamma = gamma;
  r.model.hyperparams.lambda = lambda;
  r.model.final_loss = eszsl_objective(r.model.W, ts.phi.transpose(), y, s, gamma, lambda);
  return r;
}

/// The SAE projection maps video to class space (t x d); it is stored
/// transposed so that F(v, c) = phi^T W rho(c) scores it like the others.
inline TrainResult train_sae(const TrainingSet& ts, const EmbeddingMode& mode, double lambda_sae) {
  detail::require_unreduced(ts, mode, "SAE");
  const Matrix rho = compose_matrix(ts.classes, mode, nullptr);  // C x t
  Matrix s(rho.cols(), static_cast<Eigen::Index>(ts.labels.size()));
  for (std::size_t i = 0; i < ts.labels.size(); ++i) s.col(static_cast<Eigen::Index>(i)) = rho.row(ts.labels[i]);
  TrainResult r;
  r.model.method = Method::SAE;
  r.model.mode = mode;
  r.model.raw_text_dim = ts.classes.front().text.size();
  const Matrix projection = sae_solve(ts.phi.transpose(), s, lambda_sae);
  r.model.W = projection.transpose();
  r.model.hyperparams.lambda_sae = lambda_sae;
  return r;
}

}  // namespace zsslr
