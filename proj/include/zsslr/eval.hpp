#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "zsslr/compatibility.hpp"
#include "zsslr/data_model.hpp"
#include "zsslr/error.hpp"
#include "zsslr/rng.hpp"

namespace zsslr {

using Ranking = std::vector<std::string>;  // class ids, best first
using AccuracyByK = std::map<int, double>;  // k -> percentage

struct EvalReport {
  AccuracyByK per_k;
  std::optional<AccuracyByK> seen_per_k;    // GZSL only; absent when no seen-class samples
  std::optional<AccuracyByK> unseen_per_k;  // GZSL only
  std::optional<AccuracyByK> harmonic_per_k;
  std::map<std::string, AccuracyByK> per_class;  // hit rate in [0, 1]
  std::size_t n_samples = 0;
  std::size_t n_classes = 0;
};

inline Ranking ranking_ids(const Prediction& p) {
  Ranking r;
  r.reserve(p.ranking.size());
  for (const auto& c : p.ranking) r.push_back(c.class_id);
  return r;
}

/// 2su / (s + u), and 0 when both are 0.
inline double harmonic_mean(double seen, double unseen) {
  return seen + unseen == 0.0 ? 0.0 : 2.0 * seen * unseen / (seen + unseen);
}

/// Presentation rounding used in tables.
inline double round_one_decimal(double x) { return std::round(x * 10.0) / 10.0; }

inline std::string format_one_decimal(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", round_one_decimal(x));
  return buf;
}

/// Class-normalized top-k accuracy: the unweighted mean over truth classes of
/// the fraction of that class's samples whose truth is in the top k.
inline EvalReport topk_accuracy(std::span<const Ranking> rankings, std::span<const std::string> truths,
                                std::span<const int> ks) {
  if (rankings.empty() || truths.empty()) throw Error(ErrorKind::EmptyEvaluationSet, "no samples to evaluate");
  if (rankings.size() != truths.size())
    throw Error(ErrorKind::DimensionMismatch, "one ranking per truth label required");
  if (ks.empty()) throw Error(ErrorKind::InvalidConfig, "no k values");
  for (int k : ks)
    if (k < 1) throw Error(ErrorKind::InvalidConfig, "k must be positive");

  struct Tally {
    std::size_t samples = 0;
    std::map<int, std::size_t> hits;
  };
  std::map<std::string, Tally> tally;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const auto& r = rankings[i];
    const auto pos = std::find(r.begin(), r.end(), truths[i]);
    if (pos == r.end())
      throw Error(ErrorKind::UnrankedClass, "class " + truths[i] + " is missing from the ranking of sample " +
                                                std::to_string(i));
    const auto rank = static_cast<std::size_t>(pos - r.begin());
    Tally& t = tally[truths[i]];
    ++t.samples;
    for (int k : ks)
      if (rank < static_cast<std::size_t>(k)) ++t.hits[k];
  }

  EvalReport report;
  report.n_samples = truths.size();
  report.n_classes = tally.size();
  for (int k : ks) report.per_k[k] = 0.0;
  for (const auto& [cls, t] : tally) {
    auto& pc = report.per_class[cls];
    for (int k : ks) {
      const auto it = t.hits.find(k);
      const double rate = static_cast<double>(it == t.hits.end() ? 0 : it->second) / static_cast<double>(t.samples);
      pc[k] = rate;
      report.per_k[k] += rate;
    }
  }
  for (auto& [k, v] : report.per_k) v = 100.0 * v / static_cast<double>(tally.size());
  return report;
}

/// Overall, seen-only, unseen-only and harmonic accuracies for predictions made
/// over the union of seen and unseen classes. A class listed as both seen and
/// unseen counts as seen.
inline EvalReport gzsl_report(std::span<const Ranking> rankings, std::span<const std::string> truths,
                              const SplitConfig& split, std::span<const int> ks) {
  EvalReport report = topk_accuracy(rankings, truths, ks);

  const auto subset = [&](bool want_seen) -> std::optional<AccuracyByK> {
    std::vector<Ranking> r;
    std::vector<std::string> t;
    for (std::size_t i = 0; i < truths.size(); ++i) {
      const bool is_seen = split.seen.count(truths[i]) > 0;
      const bool is_unseen = !is_seen && split.unseen.count(truths[i]) > 0;
      if (want_seen ? is_seen : is_unseen) {
        r.push_back(rankings[i]);
        t.push_back(truths[i]);
      }
    }
    if (t.empty()) return std::nullopt;
    return topk_accuracy(r, t, ks).per_k;
  };
  report.seen_per_k = subset(true);
  report.unseen_per_k = subset(false);
  AccuracyByK h;
  for (int k : ks) {
    const double s = report.seen_per_k ? report.seen_per_k->at(k) : 0.0;
    const double u = report.unseen_per_k ? report.unseen_per_k->at(k) : 0.0;
    h[k] = (report.seen_per_k && report.unseen_per_k) ? harmonic_mean(s, u) : 0.0;
  }
  report.harmonic_per_k = std::move(h);
  return report;
}

/// Monte-Carlo class-normalized top-k accuracy of uniformly random rankings
/// over `n_classes` candidates, for an evaluation set with the given number of
/// samples per truth class. Under a uniform ranking the truth's position is
/// uniform on [0, n_classes), which is what is sampled per sample and trial.
inline AccuracyByK random_baseline(std::size_t n_classes, std::span<const std::size_t> class_sizes,
                                   std::span<const int> ks, std::size_t trials, std::uint64_t seed) {
  if (n_classes == 0 || class_sizes.empty() || trials == 0)
    throw Error(ErrorKind::InvalidConfig, "random baseline needs classes, samples and at least one trial");
  for (std::size_t s : class_sizes)
    if (s == 0) throw Error(ErrorKind::InvalidConfig, "every evaluated class needs at least one sample");

  SplitMix64 rng(seed);
  AccuracyByK total;
  for (int k : ks) total[k] = 0.0;
  std::vector<std::size_t> hits(ks.size());
  for (std::size_t trial = 0; trial < trials; ++trial) {
    for (std::size_t size : class_sizes) {
      std::fill(hits.begin(), hits.end(), 0);
      for (std::size_t i = 0; i < size; ++i) {
        const auto pos = rng.below(n_classes);
        for (std::size_t j = 0; j < ks.size(); ++j)
          if (pos < static_cast<std::uint64_t>(ks[j])) ++hits[j];
      }
      for (std::size_t j = 0; j < ks.size(); ++j)
        total[ks[j]] += static_cast<double>(hits[j]) / static_cast<double>(size);
    }
  }
  for (auto& [k, v] : total) v = 100.0 * v / (static_cast<double>(trials) * static_cast<double>(class_sizes.size()));
  return total;
}

/// Fixed-width text table with one-decimal percentages.
inline std::string format_report_table(const EvalReport& report, std::span<const int> ks,
                                       const std::optional<AccuracyByK>& baseline = std::nullopt) {
  std::string out = "                ";
  char buf[64];
  for (int k : ks) {
    std::snprintf(buf, sizeof buf, "%8s", ("top-" + std::to_string(k)).c_str());
    out += buf;
  }
  out += '\n';
  const auto row = [&](const char* label, const AccuracyByK& acc) {
    std::snprintf(buf, sizeof buf, "%-16s", label);
    out += buf;
    for (int k : ks) {
      const auto it = acc.find(k);
      std::snprintf(buf, sizeof buf, "%8s", it == acc.end() ? "-" : format_one_decimal(it->second).c_str());
      out += buf;
    }
    out += '\n';
  };
  if (baseline) row("Random", *baseline);
  row("Overall", report.per_k);
  if (report.harmonic_per_k) {
    row("Seen", report.seen_per_k.value_or(AccuracyByK{}));
    row("Unseen", report.unseen_per_k.value_or(AccuracyByK{}));
    row("Harmonic", *report.harmonic_per_k);
  }
  return out;
}

}  // namespace zsslr
