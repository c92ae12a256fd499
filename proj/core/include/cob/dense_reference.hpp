#pragma once

#include <span>

#include "cob/fusion.hpp"
#include "cob/types.hpp"
#include "cob/ucm.hpp"
#include "cob/watershed.hpp"

namespace cob {

// Baseline implementations that work on full boundary grids instead of the
// sparse per-pair lists. Every operation sweeps the whole (2H-1)x(2W-1) grid
// (once per merge for the hierarchy), which is the cost the sparse path
// avoids. Results are bit-identical to the sparse counterparts.
//
// A strength grid holds, at every edgel separating two labels, the strength
// of that label pair; other cells are 0.

// Dense counterpart of sparse_from_labels + arc_orientations + owt_reweight.
BoundaryGrid dense_owt(const LabelMap& labels, const OrientedStack& stack, double epsilon = 3.0,
                       OrientationConvention convention = OrientationConvention::kTangent);

// Dense counterpart of build_ucm.
Hierarchy dense_build_ucm(const LabelMap& labels, const BoundaryGrid& strengths);

// Dense counterpart of ucm_grid, replaying the merges over the label image.
BoundaryGrid dense_ucm_grid(const Hierarchy& h);

// Dense counterpart of project(): window scan of the coarse UCM grid.
BoundaryGrid dense_project(const Hierarchy& coarse, const LabelMap& fine, double radius);

// Dense counterpart of fused_boundaries() and fuse().
BoundaryGrid dense_fused_strengths(std::span<const ScaleMember> scales, const LabelMap& fine, double radius);
Hierarchy dense_fuse(std::span<const ScaleMember> scales, const LabelMap& fine, double radius);

}  // namespace cob
