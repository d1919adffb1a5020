#include <gtest/gtest.h>

#include "support.hpp"

namespace zsslr {
namespace {

ClassDescriptor descriptor(Vector attrs, Vector text) { return {"c", "c", std::move(attrs), std::move(text)}; }

TEST(ComposeEmbedding, AttrOnlyIsIdentity) {
  const auto e = compose_embedding(descriptor(Vector{{1, 0, 1}}, Vector{{1.0}}), {EmbeddingKind::AttrOnly, 64}, nullptr);
  EXPECT_EQ(e.vector, (Vector{{1, 0, 1}}));
  EXPECT_EQ(e.class_id, "c");
}

TEST(ComposeEmbedding, TextOnlyIdentityReduction) {
  SplitMix64 rng(1);
  const Vector t = testing::unit(testing::random_vector(rng, 5));
  const ReductionMatrix identity{Matrix::Identity(5, 5)};
  const EmbeddingMode mode{EmbeddingKind::TextOnly, 5};
  EXPECT_EQ(compose_embedding(descriptor(Vector{{1.0}}, t), mode, &identity).vector, t);
  EXPECT_EQ(compose_embedding(descriptor(Vector{{1.0}}, t), mode, nullptr).vector, t);
}

TEST(ComposeEmbedding, CombinedLength) {
  SplitMix64 rng(2);
  const Vector a = testing::random_binary(rng, 53);
  const Vector t = testing::unit(testing::random_vector(rng, 300));
  const ReductionMatrix m{testing::random_matrix(rng, 300, 64)};
  const EmbeddingMode mode{EmbeddingKind::Combined, 64};
  const Vector v = compose_embedding(descriptor(a, t), mode, &m).vector;
  ASSERT_EQ(v.size(), 117);
  EXPECT_EQ(mode.embedding_length(53), 117);
  EXPECT_EQ(v.head(53), a);
  EXPECT_LT((v.tail(64) - m.matrix.transpose() * t).norm(), 1e-12);
}

TEST(ComposeEmbedding, Errors) {
  const auto d = descriptor(Vector{{1, 0}}, Vector{{0.6, 0.8}});
  try {
    compose_embedding(d, {EmbeddingKind::Combined, 1}, nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingReduction);
  }
  const ReductionMatrix wrong{Matrix::Ones(3, 1)};
  try {
    compose_embedding(d, {EmbeddingKind::TextOnly, 1}, &wrong);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(FlipAttribute, Examples) {
  EXPECT_EQ(flip_attribute(descriptor(Vector{{1, 0}}, Vector{{1.0}}), 0).attributes, (Vector{{0, 0}}));
  EXPECT_EQ(flip_attribute(descriptor(Vector{{1, 0, 1}}, Vector{{1.0}}), 1).attributes, (Vector{{1, 1, 1}}));
}

TEST(FlipAttribute, Involution) {
  SplitMix64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = descriptor(testing::random_binary(rng, 53), Vector{{1.0}});
    const auto k = static_cast<Eigen::Index>(rng.below(53));
    const auto back = flip_attribute(flip_attribute(d, k), k);
    EXPECT_EQ(back.attributes, d.attributes);
    EXPECT_NE(flip_attribute(d, k).attributes, d.attributes);
  }
}

TEST(FlipAttribute, OutOfRange) {
  const auto d = descriptor(Vector{{1, 0}}, Vector{{1.0}});
  for (Eigen::Index k : {Eigen::Index{-1}, Eigen::Index{2}}) {
    try {
      flip_attribute(d, k);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::IndexOutOfRange);
    }
  }
}

TEST(EmbeddingKind, StringRoundTrip) {
  for (auto k : {EmbeddingKind::AttrOnly, EmbeddingKind::TextOnly, EmbeddingKind::Combined})
    EXPECT_EQ(embedding_kind_from_string(to_string(k)), k);
  EXPECT_THROW(embedding_kind_from_string("both"), Error);
}

}  // namespace
}  // namespace zsslr
