#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zsslr/class_embed.hpp"
#include "zsslr/error.hpp"
#include "zsslr/temporal_agg.hpp"

namespace zsslr {

enum class Method { LLE, ESZSL, SAE };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::LLE: return "lle";
    case Method::ESZSL: return "eszsl";
    case Method::SAE: return "sae";
  }
  return "lle";
}

inline Method method_from_string(const std::string& s) {
  if (s == "lle") return Method::LLE;
  if (s == "eszsl") return Method::ESZSL;
  if (s == "sae") return Method::SAE;
  throw Error(ErrorKind::InvalidConfig, "method must be lle, eszsl or sae, got \"" + s + "\"");
}

struct Hyperparams {
  double lambda = 1e-3;      // LLE weight decay, ESZSL class-side ridge
  double gamma = 1e-3;       // ESZSL video-side ridge
  double lambda_sae = 1e-3;  // SAE reconstruction weight
  double learning_rate = 1e-2;
  double init_scale = 1e-3;
};

/// A trained bilinear compatibility model F(v, c) = phi(v)^T W rho(c).
struct CompatModel {
  Method method = Method::LLE;
  EmbeddingMode mode;
  Eigen::Index raw_text_dim = 0;  // D_text of the training classes
  Matrix W;                       // d x t
  std::optional<ReductionMatrix> reduction;
  Hyperparams hyperparams;
  std::uint64_t seed = 0;
  int epochs = 0;
  double final_loss = std::numeric_limits<double>::quiet_NaN();

  Eigen::Index video_dim() const { return W.rows(); }
  Eigen::Index class_dim() const { return W.cols(); }

  const ReductionMatrix* reduction_ptr() const { return reduction ? &*reduction : nullptr; }

  ClassEmbedding embed(const ClassDescriptor& c) const { return compose_embedding(c, mode, reduction_ptr()); }

  std::vector<ClassEmbedding> embed(std::span<const ClassDescriptor> classes) const {
    return compose_all(classes, mode, reduction_ptr());
  }
};

inline double compatibility(const Vector& phi, const CompatModel& model, const Vector& rho) {
  if (phi.size() != model.video_dim() || rho.size() != model.class_dim())
    throw Error(ErrorKind::DimensionMismatch, "phi has " + std::to_string(phi.size()) + ", rho has " +
                                                  std::to_string(rho.size()) + ", W is " +
                                                  std::to_string(model.video_dim()) + "x" +
                                                  std::to_string(model.class_dim()));
  return phi.dot(model.W * rho);
}

inline double compatibility(const VideoEmbedding& phi, const CompatModel& model, const ClassEmbedding& rho) {
  return compatibility(phi.vector, model, rho.vector);
}

/// F(v, c) for every candidate, in candidate order. The projection W^T phi is
/// shared, so a change to one candidate's embedding leaves every other score
/// bit-identical.
inline Vector candidate_scores(const Vector& phi, const CompatModel& model,
                               std::span<const ClassEmbedding> candidates) {
  if (candidates.empty()) throw Error(ErrorKind::EmptyCandidates, "no candidate classes");
  if (phi.size() != model.video_dim())
    throw Error(ErrorKind::DimensionMismatch, "video embedding has " + std::to_string(phi.size()) +
                                                  " entries, model expects " + std::to_string(model.video_dim()));
  const Vector projected = model.W.transpose() * phi;
  Vector scores(static_cast<Eigen::Index>(candidates.size()));
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const Vector& rho = candidates[j].vector;
    if (rho.size() != model.class_dim())
      throw Error(ErrorKind::DimensionMismatch, "class " + candidates[j].class_id + " embedding has " +
                                                    std::to_string(rho.size()) + " entries, model expects " +
                                                    std::to_string(model.class_dim()));
    scores[static_cast<Eigen::Index>(j)] = projected.dot(rho);
  }
  return scores;
}

/// Max-shifted softmax.
inline Vector softmax(const Vector& scores) {
  if (scores.size() == 0) throw Error(ErrorKind::EmptyCandidates, "softmax of empty score vector");
  const double m = scores.maxCoeff();
  Vector e = (scores.array() - m).exp();
  return e / e.sum();
}

/// log-softmax via log-sum-exp.
inline Vector log_softmax(const Vector& scores) {
  if (scores.size() == 0) throw Error(ErrorKind::EmptyCandidates, "softmax of empty score vector");
  const double m = scores.maxCoeff();
  const double lse = m + std::log((scores.array() - m).exp().sum());
  return scores.array() - lse;
}

/// p(c | v) over the candidate set: the softmax of compatibility scores, the
/// same form the LLE objective is trained with.
inline Vector posteriors(const Vector& phi, const CompatModel& model, std::span<const ClassEmbedding> candidates) {
  return softmax(candidate_scores(phi, model, candidates));
}

inline Vector posteriors(const VideoEmbedding& phi, const CompatModel& model,
                         std::span<const ClassEmbedding> candidates) {
  return posteriors(phi.vector, model, candidates);
}

struct RankedClass {
  std::string class_id;
  double score = 0.0;
};

struct Prediction {
  std::string class_id;
  std::vector<RankedClass> ranking;  // descending score, ties by ascending class id
};

inline std::vector<RankedClass> rank_scores(const Vector& scores, std::span<const ClassEmbedding> candidates) {
  std::vector<RankedClass> ranking;
  ranking.reserve(candidates.size());
  for (std::size_t j = 0; j < candidates.size(); ++j)
    ranking.push_back({candidates[j].class_id, scores[static_cast<Eigen::Index>(j)]});
  std::sort(ranking.begin(), ranking.end(), [](const RankedClass& a, const RankedClass& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.class_id < b.class_id;
  });
  return ranking;
}

inline Prediction predict(const Vector& phi, const CompatModel& model, std::span<const ClassEmbedding> candidates) {
  auto ranking = rank_scores(candidate_scores(phi, model, candidates), candidates);
  std::string top = ranking.front().class_id;
  return {std::move(top), std::move(ranking)};
}

inline Prediction predict(const VideoEmbedding& phi, const CompatModel& model,
                          std::span<const ClassEmbedding> candidates) {
  return predict(phi.vector, model, candidates);
}

}  // namespace zsslr
