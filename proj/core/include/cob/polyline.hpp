#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cob/types.hpp"

namespace cob {

// Point in pixel units: x along columns, y along rows (pointing down).
struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

// Grid cell (edgel or junction) position in pixel units.
inline Point2 grid_point(Edgel cell) { return {cell.col / 2.0, cell.row / 2.0}; }

// Angle in [0, pi) of the direction from -> to, measured counter-clockwise
// from the +x (column) axis with rows pointing down, i.e. atan2(-dy, dx).
double segment_angle(Point2 from, Point2 to);

// Bin k of `bins` covers [k*pi/bins - pi/(2 bins), k*pi/bins + pi/(2 bins)),
// wrapping around pi. Any finite angle is accepted (taken modulo pi).
int orientation_bin(double angle, int bins);

// Indices of the points kept by Douglas-Peucker simplification; always
// contains the first and last index. A point is kept when its distance to the
// current chord exceeds epsilon.
std::vector<std::size_t> douglas_peucker(std::span<const Point2> points, double epsilon);

// An ordered run of edgels joined end to end through junctions.
// points[i] and points[i+1] are the junctions bounding edgels[i].
struct EdgelChain {
  std::vector<Edgel> edgels;
  std::vector<Point2> points;
  bool closed = false;
};

// Splits a set of edgels into chains. Chains break at junctions where the
// number of incident edgels from the set differs from two. Deterministic for
// a given edgel set, independent of input order.
std::vector<EdgelChain> trace_chains(std::span<const Edgel> edgels);

// Per-edgel orientation bin: each edgel takes the tangent angle of the
// simplified segment that spans it.
std::vector<int> chain_orientation_bins(const EdgelChain& chain, double epsilon, int bins);

}  // namespace cob
