#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "zsslr/data_model.hpp"
#include "zsslr/error.hpp"
#include "zsslr/rng.hpp"

namespace zsslr {

/// Shape of a synthetic dataset with planted linear structure.
struct SynthSpec {
  std::size_t n_classes = 60;
  std::size_t n_seen = 40;
  std::size_t n_unseen = 10;  // the remainder are validation classes
  std::size_t attribute_count = kDefaultAttributeCount;
  std::size_t text_dim = 32;
  std::size_t samples_per_class = 20;
  std::size_t snippets = 4;
  std::size_t feature_dim = 64;
  double noise_sigma = 0.01;
  double planted_map_scale = 1.0;
  double snippet_jitter = 0.5;
  bool with_hand = false;
  SplitMode mode = SplitMode::ZSL;
  std::uint64_t seed = 1;
};

struct SynthResult {
  Dataset dataset;
  Matrix body_map;  // feature_dim x attribute_count
  Matrix hand_map;  // empty unless with_hand
};

namespace detail {

inline Matrix gaussian_matrix(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = scale * rng.gaussian();
  return m;
}

/// T rows whose column means are exactly `mean` up to rounding: zero-mean
/// Gaussian jitter around it.
inline Matrix snippet_rows(SplitMix64& rng, const Vector& mean, std::size_t snippets, double jitter) {
  Matrix rows = gaussian_matrix(rng, static_cast<Eigen::Index>(snippets), mean.size(), jitter);
  const Eigen::RowVectorXd centre = rows.colwise().mean();
  rows.rowwise() -= centre;
  rows.rowwise() += mean.transpose();
  return rows;
}

inline std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%03zu", prefix, i);
  return buf;
}

}  // namespace detail

/// Draws binary attributes (distinct per class) and unit text vectors, then
/// samples whose snippet-row mean is  planted_map * attributes(c) + N(0, sigma^2).
/// Text vectors are a noisy linear image of the signed attributes, so text
/// and combined embeddings carry the same structure. Deterministic per seed.
inline SynthResult generate(const SynthSpec& spec) {
  if (spec.n_classes == 0 || spec.n_seen == 0 || spec.n_unseen == 0 || spec.n_seen + spec.n_unseen > spec.n_classes ||
      spec.attribute_count == 0 || spec.text_dim == 0 || spec.samples_per_class == 0 || spec.snippets == 0 ||
      spec.feature_dim == 0 || spec.noise_sigma < 0.0)
    throw Error(ErrorKind::InvalidConfig, "invalid synthetic dataset spec");
  if (spec.attribute_count < 63 && (std::uint64_t{1} << spec.attribute_count) < spec.n_classes)
    throw Error(ErrorKind::InvalidConfig, "too few attributes for distinct class vectors");

  SplitMix64 rng(spec.seed);
  const auto a = static_cast<Eigen::Index>(spec.attribute_count);
  const auto d = static_cast<Eigen::Index>(spec.feature_dim);
  const auto dt = static_cast<Eigen::Index>(spec.text_dim);

  SynthResult out;
  Dataset& ds = out.dataset;
  ds.attribute_count = spec.attribute_count;
  for (std::size_t k = 0; k < spec.attribute_count; ++k) ds.attribute_names.push_back(detail::numbered("attr_", k));

  const double map_scale = spec.planted_map_scale / std::sqrt(static_cast<double>(a));
  out.body_map = detail::gaussian_matrix(rng, d, a, map_scale);
  if (spec.with_hand) out.hand_map = detail::gaussian_matrix(rng, d, a, map_scale);
  const Matrix text_map = detail::gaussian_matrix(rng, dt, a, 1.0);

  std::set<std::vector<bool>> used;
  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    ClassDescriptor cd;
    cd.class_id = detail::numbered("c", c);
    cd.name = detail::numbered("class_", c);
    cd.attributes.resize(a);
    std::vector<bool> bits;
    do {
      bits.assign(spec.attribute_count, false);
      for (Eigen::Index k = 0; k < a; ++k) {
        bits[static_cast<std::size_t>(k)] = rng.below(2) == 1;
        cd.attributes[k] = bits[static_cast<std::size_t>(k)] ? 1.0 : 0.0;
      }
    } while (!used.insert(bits).second);
    Vector text = text_map * (2.0 * cd.attributes.array() - 1.0).matrix();
    for (Eigen::Index i = 0; i < dt; ++i) text[i] += 0.1 * std::sqrt(static_cast<double>(a)) * rng.gaussian();
    cd.text = text / text.norm();
    ds.classes.push_back(std::move(cd));
  }

  for (const auto& cd : ds.classes) {
    for (std::size_t i = 0; i < spec.samples_per_class; ++i) {
      Sample s;
      s.sample_id = cd.class_id + "_s" + std::to_string(i);
      s.class_id = cd.class_id;
      const auto noisy = [&](const Matrix& map) {
        Vector m = map * cd.attributes;
        for (Eigen::Index j = 0; j < m.size(); ++j) m[j] += spec.noise_sigma * rng.gaussian();
        return m;
      };
      s.body = {s.sample_id, Stream::Body,
                detail::snippet_rows(rng, noisy(out.body_map), spec.snippets, spec.snippet_jitter)};
      if (spec.with_hand)
        s.hand = FeatureSequence{s.sample_id, Stream::Hand,
                                 detail::snippet_rows(rng, noisy(out.hand_map), spec.snippets, spec.snippet_jitter)};
      ds.samples.push_back(std::move(s));
    }
  }

  std::vector<std::size_t> order(spec.n_classes);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  ds.split.mode = spec.mode;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::string& id = ds.classes[order[i]].class_id;
    if (i < spec.n_seen)
      ds.split.seen.insert(id);
    else if (i < spec.n_seen + spec.n_unseen)
      ds.split.unseen.insert(id);
    else
      ds.split.validation.insert(id);
  }
  return out;
}

}  // namespace zsslr
