#include <gtest/gtest.h>

#include "support.hpp"
#include "zsslr/oracle.hpp"

namespace zsslr {
namespace {

const std::vector<int> kKs{1, 2, 5};

TEST(TopK, ClassNormalized) {
  const std::vector<Ranking> r{{"a", "b"}, {"a", "b"}, {"a", "b"}};
  const std::vector<std::string> t{"a", "b", "b"};
  const std::vector<int> k1{1};
  const EvalReport rep = topk_accuracy(r, t, k1);
  EXPECT_DOUBLE_EQ(rep.per_k.at(1), 50.0);
  EXPECT_EQ(rep.per_class.at("a").at(1), 1.0);
  EXPECT_EQ(rep.per_class.at("b").at(1), 0.0);
  EXPECT_EQ(rep.n_samples, 3u);
  EXPECT_EQ(rep.n_classes, 2u);
}

Ranking shuffled(SplitMix64& rng, Ranking r) {
  for (std::size_t i = r.size(); i > 1; --i) std::swap(r[i - 1], r[rng.below(i)]);
  return r;
}

TEST(TopK, ExhaustiveKIsPerfect) {
  SplitMix64 rng(1);
  const Ranking base{"a", "b", "c", "d"};
  std::vector<Ranking> r;
  std::vector<std::string> t;
  for (int i = 0; i < 30; ++i) {
    r.push_back(shuffled(rng, base));
    t.push_back(base[rng.below(4)]);
  }
  const std::vector<int> k4{4};
  EXPECT_EQ(topk_accuracy(r, t, k4).per_k.at(4), 100.0);
}

TEST(TopK, MatchesCountingOracle) {
  SplitMix64 rng(2);
  Ranking base;
  for (int c = 0; c < 7; ++c) base.push_back("c" + std::to_string(c));
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Ranking> r;
    std::vector<std::string> t;
    for (const auto& c : base)
      for (int i = 0; i < 5; ++i) {
        r.push_back(shuffled(rng, base));
        t.push_back(c);
      }
    const EvalReport rep = topk_accuracy(r, t, kKs);
    for (int k : kKs) EXPECT_NEAR(rep.per_k.at(k), oracle::brute_topk_count(r, t, k), 1e-12);
  }
}

TEST(TopK, DuplicationInvarianceAndMonotoneInK) {
  SplitMix64 rng(3);
  const Ranking base{"a", "b", "c", "d", "e", "f"};
  std::vector<Ranking> r;
  std::vector<std::string> t;
  for (int i = 0; i < 40; ++i) {
    r.push_back(shuffled(rng, base));
    t.push_back(base[rng.below(6)]);
  }
  const std::vector<int> ks{1, 2, 3, 4, 5, 6};
  const EvalReport rep = topk_accuracy(r, t, ks);
  for (std::size_t i = 1; i < ks.size(); ++i) EXPECT_LE(rep.per_k.at(ks[i - 1]), rep.per_k.at(ks[i]));
  // Duplicating every sample of one class leaves the class-normalized score unchanged.
  auto r2 = r;
  auto t2 = t;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] == t[0]) {
      r2.push_back(r[i]);
      t2.push_back(t[i]);
    }
  const EvalReport rep2 = topk_accuracy(r2, t2, ks);
  for (int k : ks) EXPECT_NEAR(rep2.per_k.at(k), rep.per_k.at(k), 1e-12);
}

TEST(TopK, Errors) {
  const std::vector<int> k1{1};
  try {
    topk_accuracy(std::vector<Ranking>{}, std::vector<std::string>{}, k1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyEvaluationSet);
  }
  try {
    topk_accuracy(std::vector<Ranking>{{"a", "b"}}, std::vector<std::string>{"z"}, k1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnrankedClass);
  }
}

TEST(Harmonic, Properties) {
  EXPECT_DOUBLE_EQ(harmonic_mean(37.5, 37.5), 37.5);
  EXPECT_EQ(harmonic_mean(60.0, 0.0), 0.0);
  EXPECT_EQ(harmonic_mean(0.0, 0.0), 0.0);
  EXPECT_EQ(round_one_decimal(harmonic_mean(54.6, 4.8)), 8.8);
  EXPECT_EQ(format_one_decimal(harmonic_mean(54.6, 4.8)), "8.8");
}

TEST(Gzsl, SeenUnseenAndHarmonic) {
  SplitConfig split;
  split.seen = {"s1", "s2"};
  split.unseen = {"u1", "u2"};
  split.mode = SplitMode::GZSL;
  const std::vector<Ranking> r{{"s1", "u1", "s2", "u2"}, {"u1", "s2", "s1", "u2"}, {"u1", "s1", "s2", "u2"},
                               {"s1", "u2", "s2", "u1"}};
  const std::vector<std::string> t{"s1", "s2", "u1", "u2"};
  const EvalReport rep = gzsl_report(r, t, split, kKs);
  ASSERT_TRUE(rep.seen_per_k && rep.unseen_per_k && rep.harmonic_per_k);
  EXPECT_EQ(rep.seen_per_k->at(1), 50.0);
  EXPECT_EQ(rep.unseen_per_k->at(1), 50.0);
  EXPECT_EQ(rep.harmonic_per_k->at(1), 50.0);
  EXPECT_EQ(rep.seen_per_k->at(2), 100.0);
  EXPECT_EQ(rep.unseen_per_k->at(2), 100.0);
  EXPECT_EQ(rep.per_k.at(1), 50.0);
}

TEST(Gzsl, MissingSubsetGivesZeroHarmonic) {
  SplitConfig split;
  split.seen = {"s"};
  split.unseen = {"u"};
  const std::vector<Ranking> r{{"u", "s"}};
  const std::vector<std::string> t{"u"};
  const EvalReport rep = gzsl_report(r, t, split, kKs);
  EXPECT_FALSE(rep.seen_per_k);
  EXPECT_EQ(rep.harmonic_per_k->at(1), 0.0);
}

TEST(RandomBaseline, FiftyClasses) {
  const std::vector<std::size_t> sizes(50, 1);
  const AccuracyByK acc = random_baseline(50, sizes, kKs, 10000, 1);
  EXPECT_NEAR(acc.at(1), 2.0, 0.5);
  EXPECT_NEAR(acc.at(2), 4.0, 0.5);
  EXPECT_NEAR(acc.at(5), 10.0, 0.7);
}

TEST(RandomBaseline, ConvergesToAnalyticForUnevenClasses) {
  const std::vector<std::size_t> sizes{1, 3, 7, 2};
  const std::vector<int> ks{1, 3};
  const AccuracyByK acc = random_baseline(9, sizes, ks, 1000000, 5);
  EXPECT_NEAR(acc.at(1), 100.0 / 9.0, 0.2);
  EXPECT_NEAR(acc.at(3), 300.0 / 9.0, 0.2);
}

TEST(RandomBaseline, DeterministicPerSeed) {
  const std::vector<std::size_t> sizes(10, 2);
  EXPECT_EQ(random_baseline(10, sizes, kKs, 500, 4), random_baseline(10, sizes, kKs, 500, 4));
}

TEST(ReportTable, OneDecimalColumns) {
  const std::vector<Ranking> r{{"a", "b"}, {"b", "a"}, {"a", "b"}};
  const std::vector<std::string> t{"a", "a", "b"};
  const std::vector<int> ks{1, 2};
  const std::string table = format_report_table(topk_accuracy(r, t, ks), ks);
  EXPECT_NE(table.find("top-1"), std::string::npos);
  EXPECT_NE(table.find("25.0"), std::string::npos) << table;
  EXPECT_NE(table.find("100.0"), std::string::npos) << table;
}

}  // namespace
}  // namespace zsslr
