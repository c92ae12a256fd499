#pragma once

#include <span>
#include <vector>

#include "cob/partition.hpp"
#include "cob/ucm.hpp"

namespace cob {

struct ScaleMember {
  Hierarchy hierarchy;
  double weight = 1.0;
};

// Default snapping radius in pixels: 0.0075 of the image diagonal, the same
// tolerance the boundary benchmark uses by default.
double default_projection_radius(int height, int width);

// Projects a coarse hierarchy onto fine boundaries: each fine edgel takes the
// UCM level of the nearest coarse boundary edgel within `radius` pixels (0
// when none), and each entry gets the mean over its edgels. Nearest ties go
// to the smallest grid (row, col). Topology of fine_sb is unchanged.
SparseBoundaries project(const Hierarchy& coarse, const SparseBoundaries& fine_sb, double radius);

// Weighted mean of per-scale strengths with weights normalized to sum 1. The
// result is independent of term order and clamped to the range spanned by
// terms with positive weight.
double fuse_strengths(std::span<const double> strengths, std::span<const double> weights);

// Projects every scale onto fine_sb, fuses the projected strengths and builds
// the UCM of the result. Throws std::invalid_argument on an empty scale set,
// negative or all-zero weights; DimensionError when sizes differ.
Hierarchy fuse(std::span<const ScaleMember> scales, const SparseBoundaries& fine_sb, const LabelMap& fine_labels,
               double radius);
Hierarchy fuse(std::span<const ScaleMember> scales, const SparseBoundaries& fine_sb, double radius);

// Per-entry fused strengths without building the hierarchy.
SparseBoundaries fused_boundaries(std::span<const ScaleMember> scales, const SparseBoundaries& fine_sb,
                                  double radius);

}  // namespace cob
