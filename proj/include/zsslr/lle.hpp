#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zsslr/class_embed.hpp"
#include "zsslr/compatibility.hpp"
#include "zsslr/error.hpp"
#include "zsslr/rng.hpp"

namespace zsslr {

struct TrainConfig {
  double lambda = 1e-3;
  double learning_rate = 1e-2;
  int epochs = 1000;
  std::uint64_t seed = 0;
  double init_scale = 1e-3;
  int max_halvings = 30;
};

/// Full-batch regularized softmax cross-entropy over the seen classes:
///
///   L(W, M) = -(1/N) sum_i log softmax_j(phi_i^T W rho_j)[y_i] + lambda ||W||_F^2
///
/// rho_j is composed from the class attributes and (optionally reduced) text.
/// Only W is penalized.
class LleObjective {
 public:
  LleObjective(Matrix phi, std::vector<Eigen::Index> labels, Matrix attributes, Matrix texts, EmbeddingMode mode,
               double lambda)
      : phi_(std::move(phi)),
        labels_(std::move(labels)),
        attributes_(std::move(attributes)),
        texts_(std::move(texts)),
        mode_(mode),
        lambda_(lambda) {
    if (phi_.rows() == 0 || static_cast<std::size_t>(phi_.rows()) != labels_.size())
      throw Error(ErrorKind::DegenerateData, "need one label per training sample");
    if (attributes_.rows() < 2) throw Error(ErrorKind::DegenerateData, "need at least 2 seen classes");
    if (mode_.uses_text() && texts_.rows() != attributes_.rows())
      throw Error(ErrorKind::DimensionMismatch, "text rows do not match class count");
    for (Eigen::Index y : labels_)
      if (y < 0 || y >= attributes_.rows()) throw Error(ErrorKind::IndexOutOfRange, "label out of range");
  }

  Eigen::Index sample_count() const { return phi_.rows(); }
  Eigen::Index class_count() const { return attributes_.rows(); }
  Eigen::Index video_dim() const { return phi_.cols(); }
  Eigen::Index class_dim() const { return mode_.embedding_length(attributes_.cols()); }
  Eigen::Index raw_text_dim() const { return texts_.cols(); }
  bool has_reduction() const { return mode_.reduces_text(texts_.cols()); }
  const EmbeddingMode& mode() const { return mode_; }
  double lambda() const { return lambda_; }

  /// Class embeddings, one row per class.
  Matrix class_embeddings(const Matrix* reduction) const {
    const Eigen::Index a = attributes_.cols();
    Matrix r(class_count(), class_dim());
    if (mode_.uses_attributes()) r.leftCols(a) = attributes_;
    if (mode_.uses_text()) {
      const Eigen::Index off = mode_.text_offset(a);
      if (has_reduction()) {
        if (!reduction) throw Error(ErrorKind::MissingReduction, "objective needs the reduction matrix");
        r.middleCols(off, mode_.text_dim) = texts_ * *reduction;
      } else {
        r.middleCols(off, mode_.text_dim) = texts_;
      }
    }
    return r;
  }

  double value(const Matrix& w, const Matrix* reduction) const {
    const Matrix scores = phi_ * w * class_embeddings(reduction).transpose();
    double nll = 0.0;
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
      const double m = scores.row(i).maxCoeff();
      const double lse = m + std::log((scores.row(i).array() - m).exp().sum());
      nll += lse - scores(i, labels_[static_cast<std::size_t>(i)]);
    }
    return nll / static_cast<double>(sample_count()) + lambda_ * w.squaredNorm();
  }

  struct Gradient {
    double loss = 0.0;
    Matrix w;
    Matrix reduction;  // empty when the mode has no reduction
  };

  Gradient gradient(const Matrix& w, const Matrix* reduction) const {
    const Matrix rho = class_embeddings(reduction);
    const Matrix projected = phi_ * w;  // N x t
    Matrix g = projected * rho.transpose();  // scores, then dL/dscores
    const double n = static_cast<double>(sample_count());
    double nll = 0.0;
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      const auto y = labels_[static_cast<std::size_t>(i)];
      const double m = g.row(i).maxCoeff();
      Eigen::RowVectorXd e = (g.row(i).array() - m).exp();
      const double z = e.sum();
      nll += m + std::log(z) - g(i, y);
      g.row(i) = e / z;
      g(i, y) -= 1.0;
    }
    g /= n;

    Gradient out;
    out.loss = nll / n + lambda_ * w.squaredNorm();
    out.w = phi_.transpose() * g * rho + 2.0 * lambda_ * w;
    if (has_reduction()) {
      const Matrix d_rho = g.transpose() * projected;  // C x t
      out.reduction = texts_.transpose() * d_rho.middleCols(mode_.text_offset(attributes_.cols()), mode_.text_dim);
    }
    return out;
  }

 private:
  Matrix phi_;
  std::vector<Eigen::Index> labels_;
  Matrix attributes_;
  Matrix texts_;
  EmbeddingMode mode_;
  double lambda_;
};

struct LleTrainResult {
  CompatModel model;
  std::vector<double> loss_history;  // loss before epoch 1, then after each accepted step
};

namespace detail {
inline Matrix uniform_matrix(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(-scale, scale);
  return m;
}
}  // namespace detail

/// Deterministic full-batch gradient descent. Each epoch starts from the
/// configured step and halves it until the loss does not increase. If every
/// halving fails while the loss is still finite, the iterate is a numerical
/// stationary point and training stops early.
inline LleTrainResult train_lle(const LleObjective& objective, const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0) || cfg.epochs < 1 || objective.lambda() < 0.0)
    throw Error(ErrorKind::InvalidConfig, "learning_rate > 0, epochs >= 1 and lambda >= 0 required");

  SplitMix64 rng(cfg.seed);
  Matrix w = detail::uniform_matrix(rng, objective.video_dim(), objective.class_dim(), cfg.init_scale);
  std::optional<Matrix> m;
  if (objective.has_reduction())
    m = detail::uniform_matrix(rng, objective.raw_text_dim(), objective.mode().text_dim, cfg.init_scale);

  LleTrainResult result;
  auto grad = objective.gradient(w, m ? &*m : nullptr);
  if (!std::isfinite(grad.loss)) throw Error(ErrorKind::NonFiniteLoss, "initial loss is not finite");
  result.loss_history.push_back(grad.loss);

  int epoch = 0;
  for (; epoch < cfg.epochs; ++epoch) {
    double step = cfg.learning_rate;
    bool accepted = false, saw_finite = false;
    for (int attempt = 0; attempt <= cfg.max_halvings; ++attempt, step *= 0.5) {
      Matrix w_next = w - step * grad.w;
      std::optional<Matrix> m_next;
      if (m) m_next = *m - step * grad.reduction;
      const double loss = objective.value(w_next, m_next ? &*m_next : nullptr);
      if (!std::isfinite(loss)) continue;
      saw_finite = true;
      if (loss <= grad.loss) {
        w = std::move(w_next);
        m = std::move(m_next);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!saw_finite) throw Error(ErrorKind::NonFiniteLoss, "loss diverged at epoch " + std::to_string(epoch + 1));
      break;
    }
    grad = objective.gradient(w, m ? &*m : nullptr);
    result.loss_history.push_back(grad.loss);
  }

  CompatModel& model = result.model;
  model.method = Method::LLE;
  model.mode = objective.mode();
  model.raw_text_dim = objective.raw_text_dim();
  model.W = std::move(w);
  if (m) model.reduction = ReductionMatrix{std::move(*m)};
  model.hyperparams.lambda = objective.lambda();
  model.hyperparams.learning_rate = cfg.learning_rate;
  model.hyperparams.init_scale = cfg.init_scale;
  model.seed = cfg.seed;
  model.epochs = epoch;
  model.final_loss = grad.loss;
  return result;
}

}  // namespace zsslr
