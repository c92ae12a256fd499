#include "cob/dense_reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "cob/polyline.hpp"

namespace cob {

namespace {

std::uint64_t pair_key(RegionId x, RegionId y) { return RegionPair::of(x, y).key(); }

// Calls fn(gr, gc, u, v) for every edgel cell, u and v being the flat indices
// of the two pixels it separates, in grid raster order.
template <typename Fn>
void for_each_edgel(int h, int w, Fn&& fn) {
  for (int gr = 0; gr < 2 * h - 1; ++gr) {
    const int r = gr / 2;
    if (gr % 2 == 0) {
      for (int c = 0; c + 1 < w; ++c) fn(gr, 2 * c + 1, r * w + c, r * w + c + 1);
    } else {
      for (int c = 0; c < w; ++c) fn(gr, 2 * c, r * w + c, (r + 1) * w + c);
    }
  }
}

// Writes each edgel's pair value, given per pair in the map, into a grid.
BoundaryGrid paint_pairs(const LabelMap& labels, const std::map<std::uint64_t, double>& values) {
  BoundaryGrid grid(labels.height(), labels.width());
  const auto& lab = labels.labels();
  for_each_edgel(labels.height(), labels.width(), [&](int gr, int gc, int u, int v) {
    if (lab[u] != lab[v]) grid(gr, gc) = values.at(pair_key(lab[u], lab[v]));
  });
  return grid;
}

std::map<std::uint64_t, double> pair_means(const LabelMap& labels, const BoundaryGrid& per_edgel) {
  std::map<std::uint64_t, MeanAccumulator> acc;
  const auto& lab = labels.labels();
  for_each_edgel(labels.height(), labels.width(), [&](int gr, int gc, int u, int v) {
    if (lab[u] != lab[v]) acc[pair_key(lab[u], lab[v])].add(per_edgel(gr, gc));
  });
  std::map<std::uint64_t, double> out;
  for (const auto& [key, m] : acc) out.emplace(key, m.mean());
  return out;
}

void fill_junctions(BoundaryGrid& grid) {
  for (int gr = 1; gr < grid.rows(); gr += 2) {
    for (int gc = 1; gc < grid.cols(); gc += 2) {
      grid(gr, gc) = std::max({grid(gr - 1, gc), grid(gr + 1, gc), grid(gr, gc - 1), grid(gr, gc + 1)});
    }
  }
}

}  // namespace

BoundaryGrid dense_owt(const LabelMap& labels, const OrientedStack& stack, double epsilon,
                       OrientationConvention convention) {
  labels.validate();
  if (stack.height() != labels.height() || stack.width() != labels.width()) {
    throw DimensionError("oriented stack size does not match the partition");
  }
  const int h = labels.height();
  const int w = labels.width();
  const int bins = stack.bins();
  const auto& lab = labels.labels();

  std::map<std::uint64_t, std::vector<Edgel>> lists;
  for_each_edgel(h, w, [&](int gr, int gc, int u, int v) {
    if (lab[u] != lab[v]) lists[pair_key(lab[u], lab[v])].push_back(Edgel{gr, gc});
  });
  BoundaryGrid bin_grid(h, w);
  for (const auto& [key, edgels] : lists) {
    for (const EdgelChain& chain : trace_chains(edgels)) {
      const auto chain_bins = chain_orientation_bins(chain, epsilon, bins);
      for (std::size_t i = 0; i < chain.edgels.size(); ++i) bin_grid[chain.edgels[i]] = chain_bins[i];
    }
  }

  const FloatMap& resp = stack.responses();
  BoundaryGrid sample(h, w);
  for_each_edgel(h, w, [&](int gr, int gc, int u, int v) {
    if (lab[u] == lab[v]) return;
    const int ch = stack_channel(static_cast<int>(bin_grid(gr, gc)), bins, convention);
    sample(gr, gc) = 0.5 * (static_cast<double>(resp(u / w, u % w, ch)) + static_cast<double>(resp(v / w, v % w, ch)));
  });
  return paint_pairs(labels, pair_means(labels, sample));
}

Hierarchy dense_build_ucm(const LabelMap& labels, const BoundaryGrid& strengths) {
  if (strengths.height() != labels.height() || strengths.width() != labels.width()) {
    throw DimensionError("strength grid and partition sizes differ");
  }
  const int h = labels.height();
  const int w = labels.width();
  const RegionId r = labels.region_count();
  std::vector<RegionId> lab = labels.labels();
  BoundaryGrid s = strengths;
  for_each_edgel(h, w, [&](int gr, int gc, int u, int v) {
    if (lab[u] != lab[v] && !(s(gr, gc) >= 0.0 && s(gr, gc) <= 1.0)) {
      throw RepresentationError("boundary strengths must lie in [0,1]");
    }
  });

  std::vector<RegionId> node(r);
  for (RegionId i = 0; i < r; ++i) node[i] = i;
  std::vector<std::size_t> count_a(r, 0), count_b(r, 0);
  std::vector<double> strength_a(r, 0.0), strength_b(r, 0.0);
  std::vector<RegionId> touched;

  Hierarchy out{labels, {}};
  double level = 0.0;
  constexpr RegionId kNone = std::numeric_limits<RegionId>::max();
  while (true) {
    // Sweep 1: weakest active pair, ties to the smallest pair.
    std::tuple<double, RegionId, RegionId> best{std::numeric_limits<double>::infinity(), kNone, kNone};
    for_each_edgel(h, w, [&](int gr, int gc, int u, int v) {
      if (lab[u] == lab[v]) return;
      const std::tuple<double, RegionId, RegionId> key{s(gr, gc), std::min(lab[u], lab[v]), std::max(lab[u], lab[v])};
      if (key < best) best = key;
    });
    const auto [strength, a, b] = best;
    if (a == kNone) break;
    level = out.merges.empty() ? strength : std::max(level, strength);

    // Sweep 2: lengths and strengths of the boundaries of a and b.
    touched.clear();
    for_each_edgel(h, w, [&](int gr, int gc, int u, int v) {
      const RegionId x = lab[u];
      const RegionId y = lab[v];
      if (x == y) return;
      const RegionId other = x == a || x == b ? y : y == a || y == b ? x : kNone;
      if (other == kNone || other == a || other == b) return;
      if (count_a[other] == 0 && count_b[other] == 0) touched.push_back(other);
      if (x == a || y == a) {
        ++count_a[other];
        strength_a[other] = s(gr, gc);
      } else {
        ++count_b[other];
        strength_b[other] = s(gr, gc);
      }
    });

    // Sweep 3: relabel b as a, then restate the strengths of shared neighbors.
    for (RegionId& l : lab) {
      if (l == b) l = a;
    }
    for_each_edgel(h, w, [&](int gr, int gc, int u, int v) {
      const RegionId x = lab[u];
      const RegionId y = lab[v];
      if (x == y || (x != a && y != a)) return;
      const RegionId other = x == a ? y : x;
      if (count_a[other] > 0 && count_b[other] > 0) {
        s(gr, gc) = combine_strength(strength_a[other], count_a[other], strength_b[other], count_b[other]);
      }
    });
    for (RegionId x : touched) count_a[x] = count_b[x] = 0;

    const RegionId parent = r + static_cast<RegionId>(out.merges.size());
    out.merges.push_back(Merge{node[a], node[b], parent, level});
    node[a] = parent;
  }
  if (out.merges.size() + 1 != r) throw ConsistencyError("region adjacency graph is disconnected");
  return out;
}

BoundaryGrid dense_ucm_grid(const Hierarchy& h) {
  h.validate();
  const int ht = h.finest.height();
  const int w = h.finest.width();
  std::vector<RegionId> lab = h.finest.labels();
  BoundaryGrid grid(ht, w);
  for (const Merge& m : h.merges) {
    for_each_edgel(ht, w, [&](int gr, int gc, int u, int v) {
      if ((lab[u] == m.a && lab[v] == m.b) || (lab[u] == m.b && lab[v] == m.a)) grid(gr, gc) = m.level;
    });
    for (RegionId& l : lab) {
      if (l == m.a || l == m.b) l = m.parent;
    }
  }
  fill_junctions(grid);
  return grid;
}

BoundaryGrid dense_project(const Hierarchy& coarse, const LabelMap& fine, double radius) {
  if (coarse.finest.height() != fine.height() || coarse.finest.width() != fine.width()) {
    throw DimensionError("coarse hierarchy and fine partition have different sizes");
  }
  if (radius < 0.0) throw std::invalid_argument("projection radius must be non-negative");
  const BoundaryGrid ucm = dense_ucm_grid(coarse);
  const double reach = 2.0 * radius;
  const long max_d2 = static_cast<long>(std::floor(reach * reach + 1e-9));
  const int k = static_cast<int>(std::floor(reach));
  const auto& lab = fine.labels();
  BoundaryGrid nearest(fine.height(), fine.width());
  for_each_edgel(fine.height(), fine.width(), [&](int gr, int gc, int u, int v) {
    if (lab[u] == lab[v]) return;
    long best_d2 = std::numeric_limits<long>::max();
    double best = 0.0;
    for (int r = std::max(0, gr - k); r <= std::min(ucm.rows() - 1, gr + k); ++r) {
      for (int c = std::max(0, gc - k); c <= std::min(ucm.cols() - 1, gc + k); ++c) {
        if (!is_edgel(r, c) || !(ucm(r, c) > 0.0)) continue;
        const long d2 = static_cast<long>(r - gr) * (r - gr) + static_cast<long>(c - gc) * (c - gc);
        if (d2 <= max_d2 && d2 < best_d2) {
          best_d2 = d2;
          best = ucm(r, c);
        }
      }
    }
    nearest(gr, gc) = best;
  });
  return paint_pairs(fine, pair_means(fine, nearest));
}

BoundaryGrid dense_fused_strengths(std::span<const ScaleMember> scales, const LabelMap& fine, double radius) {
  if (scales.empty()) throw std::invalid_argument("fusion needs at least one scale");
  std::vector<double> weights;
  double total = 0.0;
  for (const ScaleMember& s : scales) {
    if (s.weight < 0.0 || !std::isfinite(s.weight)) throw std::invalid_argument("scale weights must be >= 0");
    weights.push_back(s.weight);
    total += s.weight;
  }
  if (total <= 0.0) throw std::invalid_argument("scale weights are all zero");
  std::vector<BoundaryGrid> projected;
  for (const ScaleMember& s : scales) projected.push_back(dense_project(s.hierarchy, fine, radius));

  BoundaryGrid out(fine.height(), fine.width());
  const auto& lab = fine.labels();
  std::vector<double> strengths(scales.size());
  for_each_edgel(fine.height(), fine.width(), [&](int gr, int gc, int u, int v) {
    if (lab[u] == lab[v]) return;
    for (std::size_t i = 0; i < projected.size(); ++i) strengths[i] = projected[i](gr, gc);
    out(gr, gc) = fuse_strengths(strengths, weights);
  });
  return out;
}

Hierarchy dense_fuse(std::span<const ScaleMember> scales, const LabelMap& fine, double radius) {
  return dense_build_ucm(fine, dense_fused_strengths(scales, fine, radius));
}

}  // namespace cob
