#pragma once

#include <array>
#include <string>

#include "zsslr/data_model.hpp"
#include "zsslr/error.hpp"

namespace zsslr {

enum class AggregatorKind { AveragePool, TemporalShiftMAC };

/// How a snippet sequence collapses to one vector. Out-of-range shifts are
/// zero-filled; that is the only boundary rule.
struct AggregatorSpec {
  AggregatorKind kind = AggregatorKind::AveragePool;
  std::array<double, 3> weights{0.0, 1.0, 0.0};  // (previous, current, next)

  static AggregatorSpec average() { return {}; }
  static AggregatorSpec temporal_shift(double w_prev, double w_cur, double w_next) {
    return {AggregatorKind::TemporalShiftMAC, {w_prev, w_cur, w_next}};
  }
};

struct VideoEmbedding {
  std::string sample_id;
  Vector vector;
};

struct ShiftedSequence {
  Matrix minus;  // row i = input row i-1
  Matrix zero;
  Matrix plus;   // row i = input row i+1
};

namespace detail {
inline void require_rows(const Matrix& x) {
  if (x.rows() < 1) throw Error(ErrorKind::EmptySequence, "sequence has no snippet rows");
}
}  // namespace detail

inline Vector average_pool(const Matrix& x) {
  detail::require_rows(x);
  return x.colwise().mean().transpose();
}

inline Vector average_pool(const FeatureSequence& seq) { return average_pool(seq.data); }

inline ShiftedSequence shift_1d(const Matrix& x) {
  detail::require_rows(x);
  const Eigen::Index t = x.rows();
  ShiftedSequence s{Matrix::Zero(t, x.cols()), x, Matrix::Zero(t, x.cols())};
  if (t > 1) {
    s.minus.bottomRows(t - 1) = x.topRows(t - 1);
    s.plus.topRows(t - 1) = x.bottomRows(t - 1);
  }
  return s;
}

inline ShiftedSequence shift_1d(const FeatureSequence& seq) { return shift_1d(seq.data); }

/// Row-wise multiply-accumulate w1*X[-1] + w2*X[0] + w3*X[+1], temporally
/// average-pooled.
inline Vector tsm_aggregate(const Matrix& x, const AggregatorSpec& spec) {
  if (spec.kind != AggregatorKind::TemporalShiftMAC)
    throw Error(ErrorKind::InvalidConfig, "tsm_aggregate needs a temporal-shift aggregator");
  const ShiftedSequence s = shift_1d(x);
  const auto& [w1, w2, w3] = spec.weights;
  const Matrix y = w1 * s.minus + w2 * s.zero + w3 * s.plus;
  return average_pool(y);
}

inline Vector tsm_aggregate(const FeatureSequence& seq, const AggregatorSpec& spec) {
  return tsm_aggregate(seq.data, spec);
}

inline Vector aggregate(const Matrix& x, const AggregatorSpec& spec) {
  return spec.kind == AggregatorKind::AveragePool ? average_pool(x) : tsm_aggregate(x, spec);
}

/// Aggregates each stream independently, then concatenates body then hand.
inline VideoEmbedding embed_video(const Sample& sample, const AggregatorSpec& spec, bool use_hand) {
  if (use_hand && !sample.hand)
    throw Error(ErrorKind::MissingHandStream, "sample " + sample.sample_id + " has no hand stream");
  const Vector body = aggregate(sample.body.data, spec);
  if (!use_hand) return {sample.sample_id, body};
  const Vector hand = aggregate(sample.hand->data, spec);
  Vector v(body.size() + hand.size());
  v << body, hand;
  return {sample.sample_id, std::move(v)};
}

}  // namespace zsslr
