#pragma once

// Naive reference computations. Each one recomputes a quantity with explicit
// loops and long double accumulation, sharing no code path with the fast
// implementation it checks. Instances are limited to dimensions <= 64.

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "zsslr/data_model.hpp"
#include "zsslr/error.hpp"

namespace zsslr::oracle {

inline constexpr Eigen::Index kMaxDim = 64;

inline void require_small(std::initializer_list<Eigen::Index> dims) {
  for (Eigen::Index n : dims)
    if (n > kMaxDim) throw Error(ErrorKind::InstanceTooLarge, "oracle instances are limited to dimension 64");
}

/// sum_i sum_j phi_i W_ij rho_j
inline double brute_bilinear(const Vector& phi, const Matrix& w, const Vector& rho) {
  require_small({phi.size(), rho.size()});
  long double acc = 0.0L;
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      acc += static_cast<long double>(phi[i]) * w(i, j) * rho[j];
  return static_cast<double>(acc);
}

/// exp(s_j) / sum exp(s), without max shift, in long double.
inline std::vector<long double> brute_softmax(const std::vector<long double>& scores) {
  require_small({static_cast<Eigen::Index>(scores.size())});
  long double z = 0.0L;
  for (long double s : scores) z += std::exp(s);
  std::vector<long double> p;
  for (long double s : scores) p.push_back(std::exp(s) / z);
  return p;
}

/// Scores phi^T W rho_j for every row rho_j, via brute_bilinear-style loops.
inline std::vector<long double> brute_scores(const Vector& phi, const Matrix& w, const Matrix& rho_rows) {
  std::vector<long double> out;
  for (Eigen::Index j = 0; j < rho_rows.rows(); ++j) {
    long double acc = 0.0L;
    for (Eigen::Index a = 0; a < w.rows(); ++a)
      for (Eigen::Index b = 0; b < w.cols(); ++b) acc += static_cast<long double>(phi[a]) * w(a, b) * rho_rows(j, b);
    out.push_back(acc);
  }
  return out;
}

/// Class-normalized top-k accuracy (percent) by counting, per class, the
/// samples whose truth sits at a position < k.
inline double brute_topk_count(const std::vector<std::vector<std::string>>& rankings,
                               const std::vector<std::string>& truths, int k) {
  std::map<std::string, std::pair<long, long>> per_class;  // hits, total
  for (std::size_t i = 0; i < truths.size(); ++i) {
    bool hit = false;
    for (int r = 0; r < k && r < static_cast<int>(rankings[i].size()); ++r)
      if (rankings[i][static_cast<std::size_t>(r)] == truths[i]) hit = true;
    auto& [h, n] = per_class[truths[i]];
    h += hit ? 1 : 0;
    n += 1;
  }
  long double sum = 0.0L;
  for (const auto& [cls, hn] : per_class) sum += static_cast<long double>(hn.first) / hn.second;
  return static_cast<double>(100.0L * sum / per_class.size());
}

/// Direct 3-tap convolution over rows with zero padding, then the row mean.
inline Vector brute_tsm(const Matrix& x, double w_prev, double w_cur, double w_next) {
  require_small({x.rows(), x.cols()});
  const Eigen::Index t = x.rows();
  Vector out(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    long double acc = 0.0L;
    for (Eigen::Index i = 0; i < t; ++i) {
      const long double prev = i > 0 ? x(i - 1, c) : 0.0;
      const long double next = i + 1 < t ? x(i + 1, c) : 0.0;
      acc += w_prev * prev + w_cur * static_cast<long double>(x(i, c)) + w_next * next;
    }
    out[c] = static_cast<double>(acc / t);
  }
  return out;
}

/// Column means by explicit summation.
inline Vector brute_column_mean(const Matrix& x) {
  Vector out(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    long double acc = 0.0L;
    for (Eigen::Index r = 0; r < x.rows(); ++r) acc += x(r, c);
    out[c] = static_cast<double>(acc / x.rows());
  }
  return out;
}

/// LLE objective by explicit loops. rho(c) = [attributes(c), M^T text(c)]
/// according to the flags; pass an empty `reduction` for raw text.
struct LleInstance {
  Matrix phi;                         // N x d
  std::vector<Eigen::Index> labels;   // N
  Matrix attributes;                  // C x A (ignored unless use_attributes)
  Matrix texts;                       // C x D (ignored unless use_text)
  bool use_attributes = true;
  bool use_text = false;
  double lambda = 0.0;
};

inline long double brute_lle_objective(const LleInstance& in, const Matrix& w, const Matrix& reduction) {
  require_small({in.phi.rows(), in.phi.cols(), w.cols(), in.texts.cols()});
  const Eigen::Index n = in.phi.rows(), c = in.attributes.rows();
  std::vector<std::vector<long double>> rho(static_cast<std::size_t>(c));
  for (Eigen::Index j = 0; j < c; ++j) {
    auto& r = rho[static_cast<std::size_t>(j)];
    if (in.use_attributes)
      for (Eigen::Index k = 0; k < in.attributes.cols(); ++k) r.push_back(in.attributes(j, k));
    if (in.use_text) {
      if (reduction.size() == 0) {
        for (Eigen::Index k = 0; k < in.texts.cols(); ++k) r.push_back(in.texts(j, k));
      } else {
        for (Eigen::Index q = 0; q < reduction.cols(); ++q) {
          long double acc = 0.0L;
          for (Eigen::Index k = 0; k < in.texts.cols(); ++k) acc += static_cast<long double>(in.texts(j, k)) * reduction(k, q);
          r.push_back(acc);
        }
      }
    }
  }
  long double nll = 0.0L;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<long double> scores;
    for (Eigen::Index j = 0; j < c; ++j) {
      long double s = 0.0L;
      for (Eigen::Index a = 0; a < w.rows(); ++a)
        for (Eigen::Index b = 0; b < w.cols(); ++b)
          s += static_cast<long double>(in.phi(i, a)) * w(a, b) * rho[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)];
      scores.push_back(s);
    }
    long double z = 0.0L;
    for (long double s : scores) z += std::exp(s);
    nll -= std::log(std::exp(scores[static_cast<std::size_t>(in.labels[static_cast<std::size_t>(i)])]) / z);
  }
  long double reg = 0.0L;
  for (Eigen::Index a = 0; a < w.rows(); ++a)
    for (Eigen::Index b = 0; b < w.cols(); ++b) reg += static_cast<long double>(w(a, b)) * w(a, b);
  return nll / n + in.lambda * reg;
}

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for each entry of x.
inline Matrix finite_difference_grad(const std::function<long double(const Matrix&)>& f, const Matrix& x,
                                     double step) {
  require_small({x.rows(), x.cols()});
  Matrix g(x.rows(), x.cols());
  Matrix probe = x;
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      probe(r, c) = x(r, c) + step;
      const long double up = f(probe);
      probe(r, c) = x(r, c) - step;
      const long double down = f(probe);
      probe(r, c) = x(r, c);
      g(r, c) = static_cast<double>((up - down) / (2.0L * step));
    }
  return g;
}

/// || S S^T W + lambda W X X^T - (1 + lambda) S X^T ||_F / || (1 + lambda) S X^T ||_F
/// by explicit triple loops (W is t x d, X is d x N, S is t x N).
inline double sylvester_residual(const Matrix& w, const Matrix& x, const Matrix& s, double lambda) {
  require_small({w.rows(), w.cols()});
  const Eigen::Index t = s.rows(), d = x.rows(), n = x.cols();
  const auto dot_cols = [n](const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
    long double acc = 0.0L;
    for (Eigen::Index q = 0; q < n; ++q) acc += static_cast<long double>(a(i, q)) * b(j, q);
    return acc;
  };
  long double num = 0.0L, den = 0.0L;
  for (Eigen::Index i = 0; i < t; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      long double lhs = 0.0L;
      for (Eigen::Index q = 0; q < t; ++q) lhs += dot_cols(s, i, s, q) * w(q, j);
      for (Eigen::Index q = 0; q < d; ++q) lhs += lambda * w(i, q) * dot_cols(x, q, x, j);
      const long double rhs = (1.0L + lambda) * dot_cols(s, i, x, j);
      num += (lhs - rhs) * (lhs - rhs);
      den += rhs * rhs;
    }
  return static_cast<double>(std::sqrt(num / den));
}

}  // namespace zsslr::oracle
