#include <gtest/gtest.h>

#include "cob/types.hpp"
#include "generators.hpp"

namespace cob {
namespace {

TEST(LabelMap, RejectsZeroSizeAndMismatch) {
  EXPECT_THROW(LabelMap(0, 3, {}), RepresentationError);
  EXPECT_THROW(LabelMap(2, 2, {0, 0, 0}), RepresentationError);
}

TEST(LabelMap, ValidateDetectsGapsAndDisconnectedRegions) {
  EXPECT_NO_THROW(LabelMap(1, 3, {0, 1, 2}).validate());
  EXPECT_THROW(LabelMap(1, 3, {0, 2, 2}).validate(), RepresentationError);
  EXPECT_THROW(LabelMap(1, 3, {0, 1, 0}).validate(), RepresentationError);
  // Diagonal contact is not 4-connectivity.
  EXPECT_THROW(LabelMap(2, 2, {0, 1, 1, 0}).validate(), RepresentationError);
}

TEST(LabelMap, CanonicalOrdersByFirstAppearance) {
  const LabelMap m(2, 2, {2, 2, 0, 1});
  EXPECT_EQ(m.canonical().labels(), (std::vector<RegionId>{0, 0, 1, 2}));
  EXPECT_TRUE(same_partition(m, m.canonical()));
  EXPECT_FALSE(same_partition(m, LabelMap(2, 2, {0, 0, 1, 1})));
}

TEST(LabelMap, Coarsening) {
  const LabelMap fine(1, 4, {0, 1, 2, 3});
  EXPECT_TRUE(is_coarsening(fine, LabelMap(1, 4, {0, 0, 1, 1})));
  EXPECT_FALSE(is_coarsening(LabelMap(1, 4, {0, 0, 1, 1}), LabelMap(1, 4, {0, 1, 1, 1})));
}

TEST(Edgel, GeometryHelpers) {
  const auto [u, v] = edgel_pixels(Edgel{2, 3});
  EXPECT_EQ(u, (Pixel{1, 1}));
  EXPECT_EQ(v, (Pixel{1, 2}));
  const auto [p, q] = edgel_pixels(Edgel{3, 2});
  EXPECT_EQ(p, (Pixel{1, 1}));
  EXPECT_EQ(q, (Pixel{2, 1}));
  EXPECT_TRUE(Edgel({2, 3}).is_vertical());
  EXPECT_FALSE(Edgel({3, 2}).is_vertical());
  EXPECT_TRUE(is_edgel(0, 1));
  EXPECT_TRUE(is_edgel(1, 0));
  EXPECT_FALSE(is_edgel(1, 1));
  EXPECT_FALSE(is_edgel(2, 2));
}

TEST(BoundaryPixels, EastSouthRule) {
  const LabelMap m(2, 2, {0, 1, 0, 1});
  const BoolMap b = boundary_pixels(m);
  EXPECT_EQ(b.data, (std::vector<std::uint8_t>{1, 0, 1, 0}));
}

TEST(MeanAccumulator, ExactForEqualSamples) {
  MeanAccumulator m;
  for (int i = 0; i < 7; ++i) m.add(0.1);
  EXPECT_EQ(m.mean(), 0.1);
  m.add(0.3);
  EXPECT_GT(m.mean(), 0.1);
  EXPECT_LT(m.mean(), 0.3);
  EXPECT_EQ(MeanAccumulator{}.mean(), 0.0);
}

TEST(CombineStrength, LengthWeighted) {
  EXPECT_DOUBLE_EQ(combine_strength(0.2, 1, 0.8, 3), 0.65);
  EXPECT_EQ(combine_strength(0.7, 5, 0.7, 9), 0.7);
}

TEST(BoundaryGrid, FloatMapRoundTrip) {
  BoundaryGrid g(3, 4);
  g(0, 1) = 0.5;
  g(3, 2) = 0.25;
  const FloatMap f = g.to_float_map();
  EXPECT_EQ(f.height(), 5);
  EXPECT_EQ(f.width(), 7);
  EXPECT_EQ(BoundaryGrid::from_float_map(f), g);
}

TEST(Generators, RandomLabelsAreValid) {
  testing::Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const LabelMap m = testing::random_sized_labels(rng, 1, 20, 30);
    EXPECT_TRUE(m.is_valid());
    EXPECT_EQ(m, m.canonical());
  }
}

}  // namespace
}  // namespace cob
