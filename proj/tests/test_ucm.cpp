#include <gtest/gtest.h>

#include "cob/partition.hpp"
#include "cob/ucm.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace cob {
namespace {

using testing::Rng;

Hierarchy chain_example() {
  const LabelMap labels(1, 3, {0, 1, 2});
  SparseBoundaries sb = sparse_from_labels(labels);
  sb.at({0, 1}).strength = 0.2;
  sb.at({1, 2}).strength = 0.8;
  return build_ucm(sb, labels);
}

TEST(BuildUcm, TwoRegions) {
  const LabelMap labels(1, 2, {0, 1});
  SparseBoundaries sb = sparse_from_labels(labels);
  sb.at({0, 1}).strength = 0.3;
  const Hierarchy h = build_ucm(sb);
  ASSERT_EQ(h.merges.size(), 1u);
  EXPECT_EQ(h.merges[0], (Merge{0, 1, 2, 0.3}));
  EXPECT_EQ(level_count(h).count, 1u);
}

TEST(BuildUcm, ChainExample) {
  const Hierarchy h = chain_example();
  ASSERT_EQ(h.merges.size(), 2u);
  EXPECT_EQ(h.merges[0], (Merge{0, 1, 3, 0.2}));
  EXPECT_EQ(h.merges[1], (Merge{3, 2, 4, 0.8}));
  EXPECT_EQ(partition_at(h, 0.5).region_count(), 2u);
  EXPECT_EQ(level_count(h).levels, (std::vector<double>{0.2, 0.8}));
  const BoundaryGrid g = ucm_grid(h);
  EXPECT_EQ(g(0, 1), 0.2);
  EXPECT_EQ(g(0, 3), 0.8);
}

TEST(BuildUcm, MatchesBruteForceAgglomeration) {
  Rng rng(31);
  for (int i = 0; i < 50; ++i) {
    const LabelMap labels = testing::random_labels(rng, 8, 8, 2 + i % 30);
    const SparseBoundaries sb = testing::with_random_strengths(sparse_from_labels(labels), rng);
    const Hierarchy h = build_ucm(sb, labels);
    const auto oracle = testing::agglomerate_oracle(labels, sb);
    ASSERT_EQ(h.merges.size(), oracle.size());
    for (std::size_t k = 0; k < oracle.size(); ++k) {
      EXPECT_EQ(h.merges[k].a, oracle[k].a);
      EXPECT_EQ(h.merges[k].b, oracle[k].b);
      EXPECT_EQ(h.merges[k].parent, oracle[k].parent);
      EXPECT_NEAR(h.merges[k].level, oracle[k].level, 1e-9);
    }
  }
}

TEST(BuildUcm, ErrorsAndDeterminism) {
  EXPECT_THROW(build_ucm(SparseBoundaries(1, 2, 2), LabelMap(1, 2, {0, 1})), ConsistencyError);
  const LabelMap labels(1, 2, {0, 1});
  SparseBoundaries sb = sparse_from_labels(labels);
  sb.at({0, 1}).strength = 1.5;
  EXPECT_THROW(build_ucm(sb, labels), RepresentationError);

  Rng rng(2);
  const LabelMap l = testing::random_labels(rng, 12, 12, 20);
  const SparseBoundaries s = testing::with_quantized_strengths(sparse_from_labels(l), rng, 3);
  EXPECT_EQ(build_ucm(s, l), build_ucm(s, l));
  EXPECT_NO_THROW(build_ucm(s, l).validate());
}

TEST(BuildUcm, UltrametricInputReproducesLevels) {
  Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    const Hierarchy h = testing::random_hierarchy(rng, 10, 10, 15);
    const Hierarchy again = build_ucm(ultrametric_boundaries(h), h.finest);
    EXPECT_EQ(level_count(again).levels, level_count(h).levels);
    for (double t : level_count(h).levels) EXPECT_EQ(partition_at(again, t), partition_at(h, t));
  }
}

TEST(PartitionAt, ExtremesConservationAndBinarizeAgreement) {
  Rng rng(43);
  for (int i = 0; i < 50; ++i) {
    const Hierarchy h = testing::random_hierarchy(rng, 9, 9, 2 + i % 20);
    EXPECT_EQ(partition_at(h, -1.0), h.finest);
    EXPECT_EQ(partition_at(h, h.merges.back().level).region_count(), 1u);
    const SparseBoundaries u = ultrametric_boundaries(h);
    for (int k = 0; k < 10; ++k) {
      const double t = k / 9.0;
      const LabelMap p = partition_at(h, t);
      EXPECT_EQ(p, binarize(u, t));
      std::size_t applied = 0;
      for (const Merge& m : h.merges) applied += m.level <= t;
      EXPECT_EQ(p.region_count(), h.leaf_count() - applied);
    }
  }
}

TEST(PartitionAt, UltrametricNesting) {
  Rng rng(47);
  for (int i = 0; i < 20; ++i) {
    const Hierarchy h = testing::random_hierarchy(rng, 12, 12, 30);
    const auto levels = level_count(h).levels;
    EXPECT_LE(levels.size(), h.leaf_count() - 1);
    for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
      EXPECT_TRUE(is_coarsening(partition_at(h, levels[k]), partition_at(h, levels[k + 1])));
    }
  }
}

TEST(UcmGrid, ThresholdingReproducesPartitions) {
  Rng rng(53);
  for (int i = 0; i < 20; ++i) {
    const Hierarchy h = testing::random_hierarchy(rng, 10, 11, 25);
    const BoundaryGrid g = ucm_grid(h);
    for (int k = 0; k < 10; ++k) {
      const double t = k / 9.0;
      BoundaryGrid cut = g;
      for (double& v : cut.values()) {
        if (v <= t) v = 0.0;
      }
      EXPECT_EQ(sparse_from_dense(cut).labels, partition_at(h, t));
    }
  }
}

TEST(Hierarchy, ValidateRejectsBrokenMerges) {
  Hierarchy h = chain_example();
  h.merges[1].level = 0.1;
  EXPECT_THROW(h.validate(), ConsistencyError);
  h = chain_example();
  h.merges[1].a = 0;
  EXPECT_THROW(h.validate(), ConsistencyError);
  h = chain_example();
  h.merges.pop_back();
  EXPECT_THROW(h.validate(), ConsistencyError);
}

}  // namespace
}  // namespace cob
