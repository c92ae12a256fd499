#include <gtest/gtest.h>

#include <algorithm>

#include "cob/fusion.hpp"
#include "cob/partition.hpp"
#include "generators.hpp"

namespace cob {
namespace {

using testing::Rng;

LabelMap bands(int h, int w, std::vector<int> cuts) {
  std::vector<RegionId> l;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      l.push_back(static_cast<RegionId>(std::count_if(cuts.begin(), cuts.end(), [c](int cut) { return c >= cut; })));
    }
  }
  return LabelMap(h, w, l);
}

Hierarchy two_region_hierarchy(const LabelMap& labels, double level) {
  SparseBoundaries sb = sparse_from_labels(labels);
  sb.at({0, 1}).strength = level;
  return build_ucm(sb, labels);
}

TEST(Project, IdentityTopologyReproducesLevels) {
  Rng rng(61);
  for (int i = 0; i < 20; ++i) {
    const Hierarchy h = testing::random_hierarchy(rng, 10, 10, 20);
    const SparseBoundaries fine = sparse_from_labels(h.finest);
    const SparseBoundaries projected = project(h, fine, 1.5);
    const SparseBoundaries levels = ultrametric_boundaries(h);
    for (const RegionPair& p : fine.pairs()) EXPECT_EQ(projected.at(p).strength, levels.at(p).strength);
  }
}

TEST(Project, OnePixelShiftIsSnapped) {
  const Hierarchy coarse = two_region_hierarchy(bands(6, 12, {5}), 0.7);
  const SparseBoundaries fine = sparse_from_labels(bands(6, 12, {6}));
  EXPECT_EQ(project(coarse, fine, 2.0).at({0, 1}).strength, 0.7);
  EXPECT_EQ(project(coarse, fine, 0.4).at({0, 1}).strength, 0.0);
}

TEST(Project, NoSupportGivesZero) {
  const Hierarchy coarse = two_region_hierarchy(bands(6, 20, {3}), 0.7);
  const SparseBoundaries fine = sparse_from_labels(bands(6, 20, {3, 15}));
  const SparseBoundaries p = project(coarse, fine, 1.0);
  EXPECT_EQ(p.at({0, 1}).strength, 0.7);
  EXPECT_EQ(p.at({1, 2}).strength, 0.0);
}

TEST(Project, DimensionMismatch) {
  const Hierarchy coarse = two_region_hierarchy(bands(6, 12, {5}), 0.7);
  EXPECT_THROW(project(coarse, sparse_from_labels(bands(5, 12, {5})), 1.0), DimensionError);
}

TEST(Fuse, SingleScaleAndIdenticalScales) {
  Rng rng(67);
  for (int i = 0; i < 10; ++i) {
    const Hierarchy h = testing::random_hierarchy(rng, 10, 10, 15);
    const SparseBoundaries fine = sparse_from_labels(h.finest);
    const std::vector<ScaleMember> one{{h, 1.0}};
    const Hierarchy single = fuse(one, fine, h.finest, 1.0);
    EXPECT_EQ(level_count(single).levels, level_count(h).levels);
    const std::vector<ScaleMember> two{{h, 0.3}, {h, 2.0}};
    EXPECT_EQ(fuse(two, fine, h.finest, 1.0), single);
  }
}

TEST(Fuse, DisjointSupportsAreWeightScaled) {
  const LabelMap fine_labels = bands(6, 12, {4, 8});
  const std::vector<ScaleMember> scales{{two_region_hierarchy(bands(6, 12, {4}), 0.6), 1.0},
                                        {two_region_hierarchy(bands(6, 12, {8}), 0.4), 3.0}};
  const SparseBoundaries fused = fused_boundaries(scales, sparse_from_labels(fine_labels), 1.0);
  EXPECT_NEAR(fused.at({0, 1}).strength, 0.25 * 0.6, 1e-15);
  EXPECT_NEAR(fused.at({1, 2}).strength, 0.75 * 0.4, 1e-15);
}

TEST(Fuse, ConvexAndPermutationInvariant) {
  Rng rng(71);
  for (int i = 0; i < 20; ++i) {
    const LabelMap fine = testing::random_labels(rng, 14, 14, 30);
    const SparseBoundaries fine_sb = sparse_from_labels(fine);
    std::vector<ScaleMember> scales;
    for (int s = 0; s < 3; ++s) {
      scales.push_back({testing::random_hierarchy(rng, 14, 14, 2 + 5 * s), std::uniform_real_distribution<>(0.1, 2)(rng)});
    }
    const SparseBoundaries fused = fused_boundaries(scales, fine_sb, 1.5);
    std::vector<SparseBoundaries> projected;
    for (const auto& s : scales) projected.push_back(project(s.hierarchy, fine_sb, 1.5));
    for (const RegionPair& p : fine_sb.pairs()) {
      double lo = 1.0, hi = 0.0;
      for (const auto& pr : projected) {
        lo = std::min(lo, pr.at(p).strength);
        hi = std::max(hi, pr.at(p).strength);
      }
      EXPECT_GE(fused.at(p).strength, lo);
      EXPECT_LE(fused.at(p).strength, hi);
    }
    std::vector<ScaleMember> reversed(scales.rbegin(), scales.rend());
    EXPECT_EQ(fuse(reversed, fine_sb, fine, 1.5), fuse(scales, fine_sb, fine, 1.5));
  }
}

TEST(Fuse, RejectsBadScaleSets) {
  const LabelMap fine = bands(4, 6, {3});
  const SparseBoundaries sb = sparse_from_labels(fine);
  const Hierarchy h = two_region_hierarchy(fine, 0.5);
  EXPECT_THROW(fuse(std::vector<ScaleMember>{}, sb, fine, 1.0), std::invalid_argument);
  EXPECT_THROW(fuse(std::vector<ScaleMember>{{h, -1.0}}, sb, fine, 1.0), std::invalid_argument);
  EXPECT_THROW(fuse(std::vector<ScaleMember>{{h, 0.0}, {h, 0.0}}, sb, fine, 1.0), std::invalid_argument);
}

TEST(FuseStrengths, OrderFreeAndClamped) {
  const std::vector<double> s{0.3, 0.9, 0.1};
  const std::vector<double> w{1.0, 2.0, 0.5};
  const std::vector<double> s2{0.1, 0.3, 0.9};
  const std::vector<double> w2{0.5, 1.0, 2.0};
  EXPECT_EQ(fuse_strengths(s, w), fuse_strengths(s2, w2));
  EXPECT_EQ(fuse_strengths(std::vector<double>{0.4, 0.4}, std::vector<double>{0.3, 0.7}), 0.4);
  EXPECT_EQ(fuse_strengths(std::vector<double>{0.4, 0.9}, std::vector<double>{1.0, 0.0}), 0.4);
}

}  // namespace
}  // namespace cob
