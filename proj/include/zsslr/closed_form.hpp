#pragma once

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <string>
#include <vector>

#include "zsslr/compatibility.hpp"
#include "zsslr/error.hpp"

namespace zsslr {

// Closed-form baselines. Both use column-stacked data:
//   X : d x N video embeddings
//   S : t x C class embeddings (ESZSL) or t x N per-sample class embeddings (SAE)

/// +1 at the true class, -1 elsewhere (N x C).
inline Matrix signed_label_matrix(const std::vector<Eigen::Index>& labels, Eigen::Index class_count) {
  Matrix y = Matrix::Constant(static_cast<Eigen::Index>(labels.size()), class_count, -1.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= class_count) throw Error(ErrorKind::IndexOutOfRange, "label out of range");
    y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return y;
}

namespace detail {
inline constexpr double kMinRcond = 1e-13;

inline Matrix solve_spd(const Matrix& a, const Matrix& b, const char* what) {
  Eigen::LDLT<Matrix> ldlt(a);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < kMinRcond)
    throw Error(ErrorKind::SingularSystem, std::string(what) + " is singular or indefinite");
  return ldlt.solve(b);
}
}  // namespace detail

/// ESZSL objective
///   ||X^T W S - Y||^2 + gamma ||W S||^2 + lambda ||X^T W||^2 + gamma lambda ||W||^2
inline double eszsl_objective(const Matrix& w, const Matrix& x, const Matrix& y, const Matrix& s, double gamma,
                              double lambda) {
  return (x.transpose() * w * s - y).squaredNorm() + gamma * (w * s).squaredNorm() +
         lambda * (x.transpose() * w).squaredNorm() + gamma * lambda * w.squaredNorm();
}

/// Gradient of eszsl_objective: 2[(XX^T + gamma I) W (SS^T + lambda I) - X Y S^T].
inline Matrix eszsl_gradient(const Matrix& w, const Matrix& x, const Matrix& y, const Matrix& s, double gamma,
                             double lambda) {
  const Matrix xx = x * x.transpose() + gamma * Matrix::Identity(x.rows(), x.rows());
  const Matrix ss = s * s.transpose() + lambda * Matrix::Identity(s.rows(), s.rows());
  return 2.0 * (xx * w * ss - x * y * s.transpose());
}

/// W = (XX^T + gamma I)^-1 X Y S^T (SS^T + lambda I)^-1, returned d x t.
inline Matrix eszsl_solve(const Matrix& x, const Matrix& y, const Matrix& s, double gamma, double lambda) {
  if (y.rows() != x.cols() || y.cols() != s.cols())
    throw Error(ErrorKind::DimensionMismatch, "ESZSL: Y must be N x C for X d x N and S t x C");
  const Matrix xx = x * x.transpose() + gamma * Matrix::Identity(x.rows(), x.rows());
  const Matrix ss = s * s.transpose() + lambda * Matrix::Identity(s.rows(), s.rows());
  const Matrix left = detail::solve_spd(xx, x * y * s.transpose(), "XX^T + gamma I");
  // right-multiplication by ss^-1 == (ss^-1 left^T)^T since ss is symmetric
  return detail::solve_spd(ss, left.transpose(), "SS^T + lambda I").transpose();
}

/// Residual of the SAE Sylvester equation  S S^T W + lambda W X X^T = (1 + lambda) S X^T  (W is t x d).
inline Matrix sae_residual(const Matrix& w, const Matrix& x, const Matrix& s, double lambda) {
  return s * s.transpose() * w + lambda * w * (x * x.transpose()) - (1.0 + lambda) * s * x.transpose();
}

/// Solves the SAE Sylvester equation for the t x d projection by vectorizing
/// it, (I_d (x) SS^T + lambda XX^T (x) I_t) vec(W) = vec((1 + lambda) S X^T),
/// and solving the dense (t d) x (t d) system.
inline Matrix sae_solve(const Matrix& x, const Matrix& s, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidConfig, "SAE lambda must be > 0");
  if (x.cols() != s.cols()) throw Error(ErrorKind::DimensionMismatch, "SAE: X and S need the same sample count");
  const Eigen::Index d = x.rows(), t = s.rows(), n = t * d;
  const Matrix a = s * s.transpose();
  const Matrix b = lambda * (x * x.transpose());
  Matrix k = Matrix::Zero(n, n);
  // column-major vec: entry (i, j) of W lives at j * t + i
  for (Eigen::Index j = 0; j < d; ++j) {
    k.block(j * t, j * t, t, t) += a;
    for (Eigen::Index l = 0; l < d; ++l) k.block(l * t, j * t, t, t).diagonal().array() += b(l, j);
  }
  const Matrix rhs = (1.0 + lambda) * s * x.transpose();
  Eigen::PartialPivLU<Matrix> lu(k);
  if (lu.rcond() < detail::kMinRcond) throw Error(ErrorKind::SingularSystem, "SAE Kronecker system is singular");
  const Vector vec_w = lu.solve(Eigen::Map<const Vector>(rhs.data(), n));
  return Eigen::Map<const Matrix>(vec_w.data(), t, d);
}

}  // namespace zsslr
