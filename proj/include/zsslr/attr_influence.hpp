#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zsslr/class_embed.hpp"
#include "zsslr/compatibility.hpp"
#include "zsslr/data_model.hpp"
#include "zsslr/error.hpp"

namespace zsslr {

// Flip-difference analysis. p(c | v) is the softmax of compatibility scores
// over the candidate set (see posteriors()). Flipping attribute k of class c
// recomposes rho(c) only; every other candidate keeps its score.

/// Candidate classes with their composed embeddings under one model.
class CandidateSet {
 public:
  CandidateSet(const CompatModel& model, std::vector<ClassDescriptor> classes)
      : model_(&model), classes_(std::move(classes)), embeddings_(model.embed(classes_)) {
    if (classes_.empty()) throw Error(ErrorKind::EmptyCandidates, "no candidate classes");
  }

  const CompatModel& model() const { return *model_; }
  std::span<const ClassDescriptor> classes() const { return classes_; }
  std::span<const ClassEmbedding> embeddings() const { return embeddings_; }
  std::size_t size() const { return classes_.size(); }

  std::size_t index_of(std::string_view class_id) const {
    for (std::size_t j = 0; j < classes_.size(); ++j)
      if (classes_[j].class_id == class_id) return j;
    throw Error(ErrorKind::IndexOutOfRange, "class " + std::string(class_id) + " is not a candidate");
  }

  Vector scores(const Vector& phi) const { return candidate_scores(phi, *model_, embeddings_); }

  /// Scores with attribute k of candidate `j` flipped.
  Vector flipped_scores(const Vector& phi, std::size_t j, Eigen::Index k) const {
    return flipped_scores(phi, scores(phi), j, k);
  }

  Vector flipped_scores(const Vector& phi, const Vector& base_scores, std::size_t j, Eigen::Index k) const {
    Vector s = base_scores;
    // same scoring path as the base scores, so an attribute with zero weight
    // leaves the score bit-identical
    const std::array<ClassEmbedding, 1> flipped{model_->embed(flip_attribute(classes_[j], k))};
    s[static_cast<Eigen::Index>(j)] = candidate_scores(phi, *model_, flipped)[0];
    return s;
  }

 private:
  const CompatModel* model_;
  std::vector<ClassDescriptor> classes_;
  std::vector<ClassEmbedding> embeddings_;
};

namespace detail {
inline void require_attributes(const CompatModel& model) {
  if (!model.mode.uses_attributes())
    throw Error(ErrorKind::ModeWithoutAttributes, "attribute influence needs an attr or combined model");
}
}  // namespace detail

/// p(c|v) - p(c|v; attribute k of c flipped).
inline double flip_influence_correct(const CandidateSet& candidates, const Vector& phi, std::string_view class_id,
                                     Eigen::Index k) {
  detail::require_attributes(candidates.model());
  const std::size_t j = candidates.index_of(class_id);
  const Vector base = candidates.scores(phi);
  const auto jj = static_cast<Eigen::Index>(j);
  return softmax(base)[jj] - softmax(candidates.flipped_scores(phi, base, j, k))[jj];
}

/// log p(c*|v) - log p(c°|v), through log-softmax.
inline double log_ratio(const CandidateSet& candidates, const Vector& phi, std::string_view c_star,
                        std::string_view c_o) {
  const Vector logp = log_softmax(candidates.scores(phi));
  return logp[static_cast<Eigen::Index>(candidates.index_of(c_star))] -
         logp[static_cast<Eigen::Index>(candidates.index_of(c_o))];
}

/// r(c*, c°, v) - r(c*, c°, v; attribute k of c* flipped).
inline double flip_influence_confusion(const CandidateSet& candidates, const Vector& phi, std::string_view c_star,
                                       std::string_view c_o, Eigen::Index k) {
  detail::require_attributes(candidates.model());
  const auto js = candidates.index_of(c_star);
  const auto jo = static_cast<Eigen::Index>(candidates.index_of(c_o));
  const Vector base = candidates.scores(phi);
  const Vector before = log_softmax(base);
  const Vector after = log_softmax(candidates.flipped_scores(phi, base, js, k));
  const auto s = static_cast<Eigen::Index>(js);
  return (before[s] - before[jo]) - (after[s] - after[jo]);
}

enum class InfluenceKind { CorrectConfidence, ConfusionLogRatio };

struct InfluenceRow {
  std::string truth;      // the class (CorrectConfidence) or ground truth (ConfusionLogRatio)
  std::string predicted;  // ConfusionLogRatio only
  Vector scores;          // one per attribute
  std::size_t support = 0;
};

struct InfluenceReport {
  InfluenceKind kind = InfluenceKind::CorrectConfidence;
  std::vector<InfluenceRow> rows;
  std::vector<std::string> attribute_names;
  std::vector<std::string> omitted;  // classes without a correctly classified sample
};

/// An embedded test sample.
struct EvalSample {
  std::string sample_id;
  std::string truth;
  Vector phi;
};

namespace detail {
inline std::vector<std::string> attribute_names(const CandidateSet& c, std::span<const std::string> names) {
  const auto a = static_cast<std::size_t>(c.classes().front().attributes.size());
  std::vector<std::string> out;
  for (std::size_t k = 0; k < a; ++k) out.push_back(k < names.size() ? names[k] : "a" + std::to_string(k));
  return out;
}
}  // namespace detail

/// Per-attribute flip influence on p(c|v) for one sample, all attributes.
inline Vector correct_influences(const CandidateSet& candidates, const Vector& phi, std::string_view class_id) {
  detail::require_attributes(candidates.model());
  const std::size_t j = candidates.index_of(class_id);
  const auto jj = static_cast<Eigen::Index>(j);
  const Vector base = candidates.scores(phi);
  const double p = softmax(base)[jj];
  const Eigen::Index a = candidates.classes()[j].attributes.size();
  Vector out(a);
  for (Eigen::Index k = 0; k < a; ++k) out[k] = p - softmax(candidates.flipped_scores(phi, base, j, k))[jj];
  return out;
}

/// For each class in `classes` (ascending id): the mean per-attribute
/// influence over its correctly classified samples. Classes with none are
/// listed in `omitted`.
inline InfluenceReport class_influence_matrix(const CandidateSet& candidates, std::span<const EvalSample> samples,
                                              const std::set<std::string>& classes,
                                              std::span<const std::string> attribute_names = {}) {
  detail::require_attributes(candidates.model());
  InfluenceReport report;
  report.kind = InfluenceKind::CorrectConfidence;
  report.attribute_names = detail::attribute_names(candidates, attribute_names);

  std::map<std::string, InfluenceRow> acc;
  for (const auto& s : samples) {
    if (!classes.count(s.truth)) continue;
    const Prediction p = predict(s.phi, candidates.model(), candidates.embeddings());
    if (p.class_id != s.truth) continue;
    const Vector v = correct_influences(candidates, s.phi, s.truth);
    auto [it, fresh] = acc.try_emplace(s.truth);
    if (fresh) {
      it->second.truth = s.truth;
      it->second.scores = Vector::Zero(v.size());
    }
    it->second.scores += v;
    ++it->second.support;
  }
  for (const auto& c : classes) {
    auto it = acc.find(c);
    if (it == acc.end()) {
      report.omitted.push_back(c);
      continue;
    }
    it->second.scores /= static_cast<double>(it->second.support);
    report.rows.push_back(std::move(it->second));
  }
  return report;
}

struct AttributeSummary {
  Eigen::Index attribute = 0;
  std::string name;
  double mean_influence = 0.0;
  std::size_t affiliated_classes = 0;
};

/// For each attribute that is positive in at least `min_affiliation` of the
/// report's classes, the mean influence over exactly those classes.
inline std::vector<AttributeSummary> positive_affiliation_summary(const InfluenceReport& report,
                                                                  std::span<const ClassDescriptor> classes,
                                                                  std::size_t min_affiliation) {
  if (report.kind != InfluenceKind::CorrectConfidence)
    throw Error(ErrorKind::InvalidConfig, "affiliation summary needs a correct-confidence report");
  std::vector<AttributeSummary> out;
  if (report.rows.empty()) return out;
  const Eigen::Index a = report.rows.front().scores.size();
  const auto attrs_of = [&](const std::string& id) -> const Vector& {
    for (const auto& c : classes)
      if (c.class_id == id) return c.attributes;
    throw Error(ErrorKind::IndexOutOfRange, "no descriptor for class " + id);
  };
  for (Eigen::Index k = 0; k < a; ++k) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& row : report.rows) {
      if (attrs_of(row.truth)[k] == 1.0) {
        sum += row.scores[k];
        ++n;
      }
    }
    if (n >= min_affiliation && n > 0) {
      const auto ku = static_cast<std::size_t>(k);
      out.push_back({k, ku < report.attribute_names.size() ? report.attribute_names[ku] : "a" + std::to_string(k),
                     sum / static_cast<double>(n), n});
    }
  }
  return out;
}

/// Ranks (truth, predicted) confusions by frequency (ties by ascending pair),
/// keeps the first `top_n`, and averages the per-attribute log-ratio flip
/// influence of the predicted class over each pair's samples.
inline InfluenceReport confusion_influence_matrix(const CandidateSet& candidates, std::span<const EvalSample> samples,
                                                  std::size_t top_n,
                                                  std::span<const std::string> attribute_names = {}) {
  detail::require_attributes(candidates.model());
  std::map<std::pair<std::string, std::string>, std::vector<const EvalSample*>> pairs;
  for (const auto& s : samples) {
    const Prediction p = predict(s.phi, candidates.model(), candidates.embeddings());
    if (p.class_id != s.truth) pairs[{s.truth, p.class_id}].push_back(&s);
  }
  if (pairs.empty()) throw Error(ErrorKind::NoMisclassifications, "every sample is classified correctly");

  std::vector<std::pair<std::pair<std::string, std::string>, std::vector<const EvalSample*>>> ranked(pairs.begin(),
                                                                                                    pairs.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second.size() > b.second.size(); });
  if (ranked.size() > top_n) ranked.resize(top_n);

  InfluenceReport report;
  report.kind = InfluenceKind::ConfusionLogRatio;
  report.attribute_names = detail::attribute_names(candidates, attribute_names);
  const auto a = static_cast<Eigen::Index>(report.attribute_names.size());
  for (const auto& [pair, members] : ranked) {
    InfluenceRow row{pair.first, pair.second, Vector::Zero(a), members.size()};
    for (const EvalSample* s : members)
      for (Eigen::Index k = 0; k < a; ++k)
        row.scores[k] += flip_influence_confusion(candidates, s->phi, pair.second, pair.first, k);
    row.scores /= static_cast<double>(members.size());
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace zsslr
