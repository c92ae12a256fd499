#include <gtest/gtest.h>

#include <random>

#include "cob/watershed.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace cob {
namespace {

using testing::Rng;

TEST(Watershed, ConstantMapIsOneRegion) {
  EXPECT_EQ(watershed_oversegment(FloatMap(7, 9, 1, 0.4f)).region_count(), 1u);
}

TEST(Watershed, SplitsAtMaxima) {
  FloatMap f(1, 5);
  const float v[] = {0, 1, 0, 1, 0};
  for (int c = 0; c < 5; ++c) f(0, c) = v[c];
  const LabelMap l = watershed_oversegment(f);
  // Each maximum joins the basin that reaches it first in scan order.
  EXPECT_EQ(l.labels(), (std::vector<RegionId>{0, 0, 1, 1, 2}));
}

TEST(Watershed, RegionCountEqualsRegionalMinima) {
  Rng rng(17);
  std::uniform_int_distribution<int> level(0, 4);
  for (int i = 0; i < 40; ++i) {
    FloatMap f(16, 16);
    for (float& v : f.data()) v = static_cast<float>(i % 2 ? level(rng) / 4.0 : std::uniform_real_distribution<>(0, 1)(rng));
    const LabelMap l = watershed_oversegment(f);
    EXPECT_TRUE(l.is_valid());
    EXPECT_EQ(l.region_count(), testing::regional_minima_count(f));
  }
}

TEST(OrientedStack, Validation) {
  EXPECT_THROW(OrientedStack(FloatMap(2, 2, 1)), DimensionError);
  EXPECT_THROW(OrientedStack(FloatMap(2, 2, 8, 1.5f)), RepresentationError);
  EXPECT_NO_THROW(OrientedStack(FloatMap(2, 2, 8, 1.0f)));
}

SparseBoundaries row_split(int h, int w) {
  std::vector<RegionId> l;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) l.push_back(r < h / 2 ? 0 : 1);
  }
  return sparse_from_labels(LabelMap(h, w, l));
}

TEST(OwtReweight, ConstantStackGivesConstantStrength) {
  Rng rng(1);
  const LabelMap labels = testing::random_labels(rng, 12, 12, 15);
  const SparseBoundaries sb = sparse_from_labels(labels);
  const OrientedStack stack(FloatMap(12, 12, 8, 0.35f));
  const SparseBoundaries out = owt_reweight(sb, arc_orientations(sb), stack);
  for (const RegionPair& p : out.pairs()) EXPECT_EQ(out.at(p).strength, static_cast<double>(0.35f));
}

TEST(OwtReweight, MatchedAndOrthogonalChannels) {
  const SparseBoundaries sb = row_split(6, 10);  // horizontal boundary, bin 0
  FloatMap resp(6, 10, 8, 0.0f);
  for (float& v : resp.channel(0)) v = 1.0f;
  const OrientedStack stack(resp);
  const auto geom = arc_orientations(sb);
  EXPECT_EQ(owt_reweight(sb, geom, stack).at({0, 1}).strength, 1.0);
  EXPECT_EQ(owt_reweight(sb, geom, stack, OrientationConvention::kNormal).at({0, 1}).strength, 0.0);

  FloatMap ortho(6, 10, 8, 0.0f);
  for (float& v : ortho.channel(4)) v = 1.0f;
  EXPECT_EQ(owt_reweight(sb, geom, OrientedStack(ortho)).at({0, 1}).strength, 0.0);
  EXPECT_EQ(owt_reweight(sb, geom, OrientedStack(ortho), OrientationConvention::kNormal).at({0, 1}).strength, 1.0);
}

TEST(OwtReweight, MatchesPerEdgelLookupAndKeepsTopology) {
  Rng rng(23);
  for (int i = 0; i < 30; ++i) {
    const LabelMap labels = testing::random_labels(rng, 10, 10, 12);
    const SparseBoundaries sb = testing::with_random_strengths(sparse_from_labels(labels), rng);
    const OrientedStack stack(testing::random_map(rng, 10, 10, 8));
    const ArcGeometry geom = arc_orientations(sb, 2.0, 8);
    const SparseBoundaries out = owt_reweight(sb, geom, stack);
    ASSERT_EQ(out.pairs(), sb.pairs());
    for (const RegionPair& p : sb.pairs()) {
      EXPECT_EQ(out.at(p).coords, sb.at(p).coords);
      double sum = 0.0;
      for (const OrientedEdgel& oe : geom.at(p)) {
        const auto [u, v] = edgel_pixels(oe.edgel);
        sum += (static_cast<double>(stack.responses()(u.row, u.col, oe.bin)) + stack.responses()(v.row, v.col, oe.bin)) / 2.0;
      }
      EXPECT_NEAR(out.at(p).strength, sum / static_cast<double>(geom.at(p).size()), 1e-12);
      EXPECT_GE(out.at(p).strength, 0.0);
      EXPECT_LE(out.at(p).strength, 1.0);
    }
  }
}

TEST(OwtReweight, DimensionMismatch) {
  const SparseBoundaries sb = row_split(6, 10);
  EXPECT_THROW(owt_reweight(sb, arc_orientations(sb), OrientedStack(FloatMap(5, 10, 8))), DimensionError);
  EXPECT_THROW(owt_reweight(sb, arc_orientations(sb, 3.0, 4), OrientedStack(FloatMap(6, 10, 8))), DimensionError);
}

}  // namespace
}  // namespace cob
