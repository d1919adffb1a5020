#pragma once

#include <atomic>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "zsslr/zsslr.hpp"

namespace zsslr::testing {

inline Matrix random_matrix(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(lo, hi);
  return m;
}

inline Vector random_vector(SplitMix64& rng, Eigen::Index n, double lo = -1.0, double hi = 1.0) {
  return random_matrix(rng, n, 1, lo, hi).col(0);
}

inline Vector random_binary(SplitMix64& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.below(2) ? 1.0 : 0.0;
  return v;
}

inline Vector unit(Vector v) { return v / v.norm(); }

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("zsslr_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Three classes (a, b seen; c unseen), two samples each, A = 3, D_text = 2.
inline Dataset tiny_dataset() {
  Dataset d;
  d.attribute_count = 3;
  d.classes = {{"a", "alpha", Vector{{1.0, 0.0, 1.0}}, unit(Vector{{1.0, 0.0}})},
               {"b", "beta", Vector{{0.0, 1.0, 1.0}}, unit(Vector{{0.0, 1.0}})},
               {"c", "gamma", Vector{{1.0, 1.0, 0.0}}, unit(Vector{{1.0, 1.0}})}};
  int n = 0;
  for (const auto& c : d.classes)
    for (int i = 0; i < 2; ++i) {
      const std::string id = "s" + std::to_string(n);
      Matrix x(2, 4);
      x.setConstant(0.5 * n + 0.25 * i);
      d.samples.push_back({id, c.class_id, {id, Stream::Body, x}, std::nullopt});
      ++n;
    }
  d.split.seen = {"a", "b"};
  d.split.unseen = {"c"};
  return d;
}

}  // namespace zsslr::testing
