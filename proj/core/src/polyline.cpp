#include "cob/polyline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace cob {

double segment_angle(Point2 from, Point2 to) {
  double theta = std::atan2(-(to.y - from.y), to.x - from.x);
  if (theta < 0.0) theta += std::numbers::pi;
  if (theta >= std::numbers::pi) theta -= std::numbers::pi;
  return theta;
}

int orientation_bin(double angle, int bins) {
  const double width = std::numbers::pi / bins;
  double x = angle / width + 0.5;
  // Snap values within rounding noise of a bin edge onto the edge.
  if (std::abs(x - std::round(x)) < 1e-9) x = std::round(x);
  const double k = std::floor(x);
  const long m = static_cast<long>(k) % bins;
  return static_cast<int>(m < 0 ? m + bins : m);
}

namespace {

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return std::hypot(p.x - a.x, p.y - a.y);
  const double t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

}  // namespace

std::vector<std::size_t> douglas_peucker(std::span<const Point2> points, double epsilon) {
  const std::size_t n = points.size();
  if (n <= 2) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  std::vector<std::uint8_t> keep(n, 0);
  keep[0] = keep[n - 1] = 1;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, n - 1}};
  while (!stack.empty()) {
    const auto [first, last] = stack.back();
    stack.pop_back();
    double max_dist = -1.0;
    std::size_t index = first;
    for (std::size_t i = first + 1; i < last; ++i) {
      const double d = point_segment_distance(points[i], points[first], points[last]);
      if (d > max_dist) {
        max_dist = d;
        index = i;
      }
    }
    if (index != first && max_dist > epsilon) {
      keep[index] = 1;
      stack.emplace_back(first, index);
      stack.emplace_back(index, last);
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) out.push_back(i);
  }
  return out;
}

namespace {

std::uint64_t cell_key(Edgel c) {
  // Junctions may sit one cell outside the grid; shift to keep keys positive.
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.row + 1)) << 32) |
         static_cast<std::uint32_t>(c.col + 1);
}

}  // namespace

std::vector<EdgelChain> trace_chains(std::span<const Edgel> input) {
  std::vector<Edgel> edgels(input.begin(), input.end());
  std::sort(edgels.begin(), edgels.end());
  const std::size_t n = edgels.size();

  // (junction, edgel index) incidences grouped by junction.
  std::vector<std::pair<std::uint64_t, std::size_t>> inc;
  inc.reserve(2 * n);
  std::vector<std::pair<Edgel, Edgel>> ends(n);
  for (std::size_t i = 0; i < n; ++i) {
    ends[i] = edgel_junctions(edgels[i]);
    inc.emplace_back(cell_key(ends[i].first), i);
    inc.emplace_back(cell_key(ends[i].second), i);
  }
  std::sort(inc.begin(), inc.end());

  auto incident = [&](Edgel j) {
    const auto key = cell_key(j);
    auto lo = std::lower_bound(inc.begin(), inc.end(), std::make_pair(key, std::size_t{0}));
    auto hi = lo;
    while (hi != inc.end() && hi->first == key) ++hi;
    return std::make_pair(lo, hi);
  };

  std::vector<std::uint8_t> visited(n, 0);
  std::vector<EdgelChain> chains;

  auto walk = [&](Edgel start, std::size_t first) {
    EdgelChain chain;
    chain.points.push_back(grid_point(start));
    Edgel at = start;
    std::size_t e = first;
    while (true) {
      visited[e] = 1;
      const Edgel next = ends[e].first == at ? ends[e].second : ends[e].first;
      chain.edgels.push_back(edgels[e]);
      chain.points.push_back(grid_point(next));
      at = next;
      const auto [lo, hi] = incident(at);
      if (hi - lo != 2) break;
      const std::size_t other = lo->second == e ? (lo + 1)->second : lo->second;
      if (visited[other]) {
        chain.closed = (at == start);
        break;
      }
      e = other;
    }
    chains.push_back(std::move(chain));
  };

  // Open chains start at junctions of degree != 2.
  for (std::size_t k = 0; k < inc.size();) {
    std::size_t m = k;
    while (m < inc.size() && inc[m].first == inc[k].first) ++m;
    if (m - k != 2) {
      const std::size_t e0 = inc[k].second;
      const Edgel junction = cell_key(ends[e0].first) == inc[k].first ? ends[e0].first : ends[e0].second;
      for (std::size_t t = k; t < m; ++t) {
        if (!visited[inc[t].second]) walk(junction, inc[t].second);
      }
    }
    k = m;
  }
  // Whatever is left forms closed loops.
  for (std::size_t i = 0; i < n; ++i) {
    if (!visited[i]) walk(std::min(ends[i].first, ends[i].second), i);
  }
  return chains;
}

std::vector<int> chain_orientation_bins(const EdgelChain& chain, double epsilon, int bins) {
  std::vector<std::size_t> kept;
  const std::size_t n = chain.points.size();
  if (chain.closed && n > 3) {
    // A loop has no chord; split it at the point farthest from its start.
    std::size_t far = 1;
    double best = -1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double d = std::hypot(chain.points[i].x - chain.points[0].x, chain.points[i].y - chain.points[0].y);
      if (d > best) {
        best = d;
        far = i;
      }
    }
    const std::span<const Point2> pts(chain.points);
    kept = douglas_peucker(pts.subspan(0, far + 1), epsilon);
    for (std::size_t k : douglas_peucker(pts.subspan(far), epsilon)) {
      if (k > 0) kept.push_back(far + k);
    }
  } else {
    kept = douglas_peucker(chain.points, epsilon);
  }
  std::vector<int> out(chain.edgels.size(), 0);
  for (std::size_t s = 0; s + 1 < kept.size(); ++s) {
    const int bin = orientation_bin(segment_angle(chain.points[kept[s]], chain.points[kept[s + 1]]), bins);
    for (std::size_t i = kept[s]; i < kept[s + 1]; ++i) out[i] = bin;
  }
  return out;
}

}  // namespace cob
