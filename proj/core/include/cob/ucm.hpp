#pragma once

#include <cstddef>
#include <vector>

#include "cob/partition.hpp"
#include "cob/types.hpp"

namespace cob {

// One step of the agglomeration: nodes a and b join into `parent` at `level`.
// Leaves are the finest regions 0..R-1; the k-th merge creates node R+k.
struct Merge {
  RegionId a = 0;
  RegionId b = 0;
  RegionId parent = 0;
  double level = 0.0;
  bool operator==(const Merge&) const = default;
};

// Ultrametric Contour Map stored as finest partition plus merge sequence.
struct Hierarchy {
  LabelMap finest;
  std::vector<Merge> merges;

  RegionId leaf_count() const { return finest.region_count(); }
  RegionId root() const { return static_cast<RegionId>(2 * leaf_count() - 2); }

  // R-1 merges, nondecreasing levels, sequential parents, each node merged
  // at most once. Throws ConsistencyError.
  void validate() const;

  bool operator==(const Hierarchy&) const = default;
};

// Greedy agglomeration: repeatedly erases the weakest entry (ties to the
// smallest pair), recording level = max(strength, previous level). Merged
// entries take length-weighted mean strengths. The surviving working id is
// the smaller of the pair. Throws ConsistencyError when the adjacency graph
// is disconnected and RepresentationError on strengths outside [0,1].
Hierarchy build_ucm(const SparseBoundaries& sb, const LabelMap& finest);

// Same, recovering the finest labeling from sb itself.
Hierarchy build_ucm(const SparseBoundaries& sb);

// Partition after applying every merge with level <= t. Ids are canonical.
LabelMap partition_at(const Hierarchy& h, double t);

// Boundaries of the finest partition carrying, per entry, the level at which
// its two regions first merge.
SparseBoundaries ultrametric_boundaries(const Hierarchy& h);

// Dense (2H-1)x(2W-1) UCM: every edgel carries the level at which it vanishes.
BoundaryGrid ucm_grid(const Hierarchy& h);

struct LevelSummary {
  std::size_t count = 0;
  std::vector<double> levels;  // distinct, ascending
};

LevelSummary level_count(const Hierarchy& h);

}  // namespace cob
