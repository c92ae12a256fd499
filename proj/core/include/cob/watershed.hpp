#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "cob/partition.hpp"
#include "cob/types.hpp"

namespace cob {

// K-channel contour responses; channel k responds to boundaries whose
// tangent angle is k*pi/K (see segment_angle() for the angle convention).
class OrientedStack {
 public:
  OrientedStack() = default;
  // Throws DimensionError when K < 2, RepresentationError on values outside [0,1].
  explicit OrientedStack(FloatMap responses);

  int bins() const { return responses_.channels(); }
  int height() const { return responses_.height(); }
  int width() const { return responses_.width(); }
  const FloatMap& responses() const { return responses_; }

 private:
  FloatMap responses_;
};

// Which stack channel an edgel reads: the one matching its boundary tangent
// (default) or the one matching its normal (tangent bin + K/2).
enum class OrientationConvention { kTangent, kNormal };

struct OrientedEdgel {
  Edgel edgel;
  int bin = 0;
  bool operator==(const OrientedEdgel&) const = default;
};

// Per-entry edgel orientation bins, listed in the entry's coordinate order.
struct ArcGeometry {
  int bins = 8;
  std::unordered_map<std::uint64_t, std::vector<OrientedEdgel>> arcs;

  const std::vector<OrientedEdgel>& at(RegionPair p) const;
};

// Catchment basins of the strength surface by priority flooding. Every
// regional-minimum plateau seeds one basin; other pixels join the first basin
// that reaches them, ties popped in (value, row, col) order. Ids are canonical.
LabelMap watershed_oversegment(const FloatMap& strength);

// Chains every entry's edgels, simplifies each chain with Douglas-Peucker at
// tolerance epsilon (pixels) and gives each edgel the quantized tangent bin of
// its simplified segment.
ArcGeometry arc_orientations(const SparseBoundaries& sb, double epsilon = 3.0, int bins = 8);

// Oriented Watershed Transform reweighting: entry strength becomes the mean,
// over its edgels, of the stack response in the edgel's orientation channel,
// sampled as the average of the two pixels the edgel separates. Topology is
// unchanged. Throws DimensionError on size or bin-count mismatch and
// ConsistencyError when geom does not cover sb.
SparseBoundaries owt_reweight(const SparseBoundaries& sb, const ArcGeometry& geom, const OrientedStack& stack,
                              OrientationConvention convention = OrientationConvention::kTangent);

// Stack channel read for an edgel of the given bin.
int stack_channel(int bin, int bins, OrientationConvention convention);

}  // namespace cob
