#include "cob/watershed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <tuple>

#include "cob/polyline.hpp"

namespace cob {

OrientedStack::OrientedStack(FloatMap responses) : responses_(std::move(responses)) {
  if (responses_.channels() < 2) throw DimensionError("an oriented stack needs at least two orientation bins");
  for (float v : responses_.data()) {
    if (!(v >= 0.0f && v <= 1.0f)) throw RepresentationError("oriented responses must lie in [0,1]");
  }
}

const std::vector<OrientedEdgel>& ArcGeometry::at(RegionPair p) const {
  auto it = arcs.find(p.key());
  if (it == arcs.end()) {
    throw ConsistencyError("no arc geometry for pair (" + std::to_string(p.a) + "," + std::to_string(p.b) + ")");
  }
  return it->second;
}

int stack_channel(int bin, int bins, OrientationConvention convention) {
  return convention == OrientationConvention::kTangent ? bin : (bin + bins / 2) % bins;
}

LabelMap watershed_oversegment(const FloatMap& strength) {
  if (strength.channels() != 1) throw DimensionError("watershed expects a single-channel strength map");
  const int h = strength.height();
  const int w = strength.width();
  const std::size_t n = strength.plane_size();
  const auto& f = strength.data();
  constexpr RegionId kUnset = std::numeric_limits<RegionId>::max();

  auto for_neighbors = [&](int p, auto&& fn) {
    const int r = p / w;
    const int c = p % w;
    if (r > 0) fn(p - w);
    if (c > 0) fn(p - 1);
    if (c + 1 < w) fn(p + 1);
    if (r + 1 < h) fn(p + w);
  };

  // Regional minima: equal-valued plateaus without a strictly lower neighbor.
  std::vector<RegionId> label(n, kUnset);
  std::vector<int> plateau(n, -1);
  std::vector<int> members;
  std::vector<int> stack;
  RegionId seeds = 0;
  for (int start = 0; start < static_cast<int>(n); ++start) {
    if (plateau[start] >= 0) continue;
    members.clear();
    plateau[start] = start;
    stack.push_back(start);
    bool minimum = true;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      members.push_back(p);
      for_neighbors(p, [&](int q) {
        if (f[q] < f[p]) {
          minimum = false;
        } else if (f[q] == f[p] && plateau[q] < 0) {
          plateau[q] = start;
          stack.push_back(q);
        }
      });
    }
    if (minimum) {
      for (int p : members) label[p] = seeds;
      ++seeds;
    }
  }

  using Item = std::tuple<float, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (int p = 0; p < static_cast<int>(n); ++p) {
    if (label[p] != kUnset) queue.emplace(f[p], p);
  }
  while (!queue.empty()) {
    const int p = std::get<1>(queue.top());
    queue.pop();
    for_neighbors(p, [&](int q) {
      if (label[q] == kUnset) {
        label[q] = label[p];
        queue.emplace(f[q], q);
      }
    });
  }
  return LabelMap(h, w, std::move(label)).canonical();
}

ArcGeometry arc_orientations(const SparseBoundaries& sb, double epsilon, int bins) {
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be non-negative");
  if (bins < 2) throw DimensionError("orientation bins must be >= 2");
  ArcGeometry geom;
  geom.bins = bins;
  sb.for_each([&](RegionPair p, const BoundaryEntry& e) {
    std::vector<OrientedEdgel> bins_sorted;
    bins_sorted.reserve(e.coords.size());
    for (const EdgelChain& chain : trace_chains(e.coords)) {
      const auto chain_bins = chain_orientation_bins(chain, epsilon, bins);
      for (std::size_t i = 0; i < chain.edgels.size(); ++i) bins_sorted.push_back({chain.edgels[i], chain_bins[i]});
    }
    std::sort(bins_sorted.begin(), bins_sorted.end(),
              [](const OrientedEdgel& x, const OrientedEdgel& y) { return x.edgel < y.edgel; });
    std::vector<OrientedEdgel> ordered;
    ordered.reserve(e.coords.size());
    for (const Edgel& g : e.coords) {
      auto it = std::lower_bound(bins_sorted.begin(), bins_sorted.end(), g,
                                 [](const OrientedEdgel& x, const Edgel& y) { return x.edgel < y; });
      ordered.push_back(*it);
    }
    geom.arcs.emplace(p.key(), std::move(ordered));
  });
  return geom;
}

SparseBoundaries owt_reweight(const SparseBoundaries& sb, const ArcGeometry& geom, const OrientedStack& stack,
                              OrientationConvention convention) {
  if (stack.height() != sb.height() || stack.width() != sb.width()) {
    throw DimensionError("oriented stack size does not match the partition");
  }
  if (stack.bins() != geom.bins) throw DimensionError("oriented stack and arc geometry disagree on bin count");
  const FloatMap& resp = stack.responses();
  SparseBoundaries out = sb;
  out.for_each_mut([&](RegionPair p, BoundaryEntry& e) {
    const auto& arc = geom.at(p);
    if (arc.size() != e.coords.size()) throw ConsistencyError("arc geometry does not cover its entry");
    MeanAccumulator mean;
    for (std::size_t i = 0; i < arc.size(); ++i) {
      if (arc[i].edgel != e.coords[i]) throw ConsistencyError("arc geometry does not follow the entry's edgels");
      const int ch = stack_channel(arc[i].bin, stack.bins(), convention);
      const auto [u, v] = edgel_pixels(arc[i].edgel);
      mean.add(0.5 * (static_cast<double>(resp(u.row, u.col, ch)) + static_cast<double>(resp(v.row, v.col, ch))));
    }
    e.strength = mean.mean();
  });
  return out;
}

}  // namespace cob
