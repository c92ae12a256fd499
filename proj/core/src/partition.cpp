#include "cob/partition.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>
#include <string>

namespace cob {

namespace {

std::string pair_name(RegionPair p) {
  return "(" + std::to_string(p.a) + "," + std::to_string(p.b) + ")";
}

void remove_value(std::vector<RegionId>& v, RegionId x) {
  auto it = std::find(v.begin(), v.end(), x);
  if (it != v.end()) {
    *it = v.back();
    v.pop_back();
  }
}

// Raster-order 4-connected components of pixels, where `blocked(e)` tells
// whether edgel e separates its two pixels.
template <typename Blocked>
LabelMap flood_components(int h, int w, Blocked&& blocked) {
  constexpr RegionId kUnset = std::numeric_limits<RegionId>::max();
  std::vector<RegionId> labels(static_cast<std::size_t>(h) * w, kUnset);
  std::vector<int> stack;
  RegionId next = 0;
  for (int start = 0; start < h * w; ++start) {
    if (labels[start] != kUnset) continue;
    labels[start] = next;
    stack.push_back(start);
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      const int r = p / w;
      const int c = p % w;
      auto visit = [&](int q, Edgel e) {
        if (labels[q] == kUnset && !blocked(e)) {
          labels[q] = next;
          stack.push_back(q);
        }
      };
      if (r > 0) visit(p - w, Edgel{2 * r - 1, 2 * c});
      if (r + 1 < h) visit(p + w, Edgel{2 * r + 1, 2 * c});
      if (c > 0) visit(p - 1, Edgel{2 * r, 2 * c - 1});
      if (c + 1 < w) visit(p + 1, Edgel{2 * r, 2 * c + 1});
    }
    ++next;
  }
  return LabelMap(h, w, std::move(labels));
}

}  // namespace

// ---------------------------------------------------------------------------
// SparseBoundaries
// ---------------------------------------------------------------------------

SparseBoundaries::SparseBoundaries(int height, int width, RegionId region_count)
    : height_(height), width_(width), region_count_(region_count), neighbors_(region_count) {
  if (height <= 0 || width <= 0) throw RepresentationError("sparse boundaries need a non-empty image");
  if (region_count == 0) throw RepresentationError("a partition has at least one region");
}

std::size_t SparseBoundaries::edgel_count() const {
  std::size_t n = 0;
  for (const auto& [k, e] : entries_) n += e.coords.size();
  return n;
}

const BoundaryEntry* SparseBoundaries::find(RegionPair p) const {
  auto it = entries_.find(p.key());
  return it == entries_.end() ? nullptr : &it->second;
}

const BoundaryEntry& SparseBoundaries::at(RegionPair p) const {
  auto it = entries_.find(p.key());
  if (it == entries_.end()) throw LookupError("no boundary entry for pair " + pair_name(p));
  return it->second;
}

BoundaryEntry& SparseBoundaries::at(RegionPair p) {
  auto it = entries_.find(p.key());
  if (it == entries_.end()) throw LookupError("no boundary entry for pair " + pair_name(p));
  return it->second;
}

void SparseBoundaries::insert(RegionPair p, BoundaryEntry entry) {
  if (p.a >= p.b || p.b >= region_count_) throw LookupError("invalid region pair " + pair_name(p));
  if (entry.coords.empty()) throw ConsistencyError("empty coordinate list for pair " + pair_name(p));
  auto [it, inserted] = entries_.emplace(p.key(), std::move(entry));
  if (!inserted) throw ConsistencyError("duplicate boundary entry " + pair_name(p));
  neighbors_[p.a].push_back(p.b);
  neighbors_[p.b].push_back(p.a);
}

std::span<const RegionId> SparseBoundaries::neighbors(RegionId id) const {
  if (id >= region_count_) throw LookupError("region id " + std::to_string(id) + " out of range");
  return neighbors_[id];
}

std::vector<RegionPair> SparseBoundaries::pairs() const {
  std::vector<RegionPair> out;
  out.reserve(entries_.size());
  for (const auto& [k, e] : entries_) out.push_back(RegionPair::from_key(k));
  std::sort(out.begin(), out.end());
  return out;
}

void SparseBoundaries::unlink(RegionId x, RegionId y) {
  remove_value(neighbors_[x], y);
  remove_value(neighbors_[y], x);
}

RegionId SparseBoundaries::merge_regions(RegionPair p, EraseStats* stats) {
  auto it = entries_.find(p.key());
  if (it == entries_.end()) throw LookupError("cannot erase unknown pair " + pair_name(p));
  const RegionId a = p.a;
  const RegionId b = p.b;
  entries_.erase(it);
  unlink(a, b);
  if (stats) ++stats->entries_touched;

  std::vector<RegionId> b_neighbors = std::move(neighbors_[b]);
  neighbors_[b].clear();
  for (RegionId x : b_neighbors) {
    auto node = entries_.extract(RegionPair::of(b, x).key());
    remove_value(neighbors_[x], b);
    if (stats) ++stats->entries_touched;
    const RegionPair ax = RegionPair::of(a, x);
    auto target = entries_.find(ax.key());
    if (target != entries_.end()) {
      BoundaryEntry& dst = target->second;
      BoundaryEntry& src = node.mapped();
      dst.strength = combine_strength(dst.strength, dst.coords.size(), src.strength, src.coords.size());
      dst.coords.insert(dst.coords.end(), src.coords.begin(), src.coords.end());
      if (stats) {
        ++stats->entries_touched;
        stats->edgels_moved += src.coords.size();
      }
    } else {
      node.key() = ax.key();
      entries_.insert(std::move(node));
      neighbors_[a].push_back(x);
      neighbors_[x].push_back(a);
    }
  }
  return a;
}

EraseStats SparseBoundaries::erase(RegionPair p) {
  EraseStats stats;
  merge_regions(p, &stats);
  const RegionId vacated = p.b;
  const RegionId last = region_count_ - 1;
  if (vacated != last) {
    std::vector<RegionId> moved = std::move(neighbors_[last]);
    neighbors_[last].clear();
    for (RegionId x : moved) {
      auto node = entries_.extract(RegionPair::of(last, x).key());
      node.key() = RegionPair::of(vacated, x).key();
      entries_.insert(std::move(node));
      std::replace(neighbors_[x].begin(), neighbors_[x].end(), last, vacated);
      ++stats.entries_touched;
    }
    neighbors_[vacated] = std::move(moved);
  }
  neighbors_.pop_back();
  --region_count_;
  return stats;
}

SparseBoundaries SparseBoundaries::normalized() const {
  SparseBoundaries out = *this;
  for (auto& [k, e] : out.entries_) std::sort(e.coords.begin(), e.coords.end());
  for (auto& n : out.neighbors_) std::sort(n.begin(), n.end());
  return out;
}

bool SparseBoundaries::operator==(const SparseBoundaries& other) const {
  return height_ == other.height_ && width_ == other.width_ && region_count_ == other.region_count_ &&
         entries_ == other.entries_;
}

// ---------------------------------------------------------------------------
// Conversions
// ---------------------------------------------------------------------------

SparseBoundaries sparse_from_labels(const LabelMap& labels) {
  labels.validate();
  const int h = labels.height();
  const int w = labels.width();
  SparseBoundaries sb(h, w, labels.region_count());
  std::unordered_map<std::uint64_t, std::vector<Edgel>> lists;
  std::vector<std::uint64_t> order;
  auto add = [&](RegionId x, RegionId y, Edgel e) {
    const auto key = RegionPair::of(x, y).key();
    auto [it, inserted] = lists.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(e);
  };
  // Grid raster order: even grid rows hold vertical edgels, odd rows horizontal.
  for (int gr = 0; gr < 2 * h - 1; ++gr) {
    if (gr % 2 == 0) {
      const int r = gr / 2;
      for (int c = 0; c + 1 < w; ++c) {
        if (labels(r, c) != labels(r, c + 1)) add(labels(r, c), labels(r, c + 1), Edgel{gr, 2 * c + 1});
      }
    } else {
      const int r = gr / 2;
      for (int c = 0; c < w; ++c) {
        if (labels(r, c) != labels(r + 1, c)) add(labels(r, c), labels(r + 1, c), Edgel{gr, 2 * c});
      }
    }
  }
  for (auto key : order) {
    sb.insert(RegionPair::from_key(key), BoundaryEntry{0.0, std::move(lists[key])});
  }
  return sb;
}

BoundaryGrid dense_from_sparse(const SparseBoundaries& sb, const LabelMap& labels) {
  if (sb.height() != labels.height() || sb.width() != labels.width()) {
    throw DimensionError("sparse boundaries and label map sizes differ");
  }
  BoundaryGrid grid(sb.height(), sb.width());
  std::vector<std::uint8_t> written(grid.values().size(), 0);
  sb.for_each([&](RegionPair p, const BoundaryEntry& e) {
    for (const Edgel& g : e.coords) {
      if (g.row < 0 || g.col < 0 || g.row >= grid.rows() || g.col >= grid.cols() || !is_edgel(g.row, g.col)) {
        throw ConsistencyError("coordinate is not an edgel of the grid");
      }
      auto& flag = written[static_cast<std::size_t>(g.row) * grid.cols() + g.col];
      if (flag) throw ConsistencyError("edgel listed twice");
      flag = 1;
      const auto [u, v] = edgel_pixels(g);
      if (RegionPair::of(labels(u.row, u.col), labels(v.row, v.col)) != p) {
        throw ConsistencyError("edgel does not separate the regions of pair " + pair_name(p));
      }
      grid[g] = e.strength;
    }
  });
  for (int gr = 1; gr < grid.rows(); gr += 2) {
    for (int gc = 1; gc < grid.cols(); gc += 2) {
      grid(gr, gc) = std::max({grid(gr - 1, gc), grid(gr + 1, gc), grid(gr, gc - 1), grid(gr, gc + 1)});
    }
  }
  return grid;
}

Partition sparse_from_dense(const BoundaryGrid& grid) {
  const int h = grid.height();
  const int w = grid.width();
  LabelMap labels = flood_components(h, w, [&](Edgel e) { return grid[e] > 0.0; });
  SparseBoundaries sb(h, w, labels.region_count());
  std::unordered_map<std::uint64_t, std::pair<MeanAccumulator, std::vector<Edgel>>> acc;
  std::vector<std::uint64_t> order;
  for (int gr = 0; gr < grid.rows(); ++gr) {
    for (int gc = (gr % 2 == 0) ? 1 : 0; gc < grid.cols(); gc += 2) {
      const Edgel e{gr, gc};
      const double v = grid[e];
      if (!(v > 0.0)) continue;
      const auto [p, q] = edgel_pixels(e);
      const RegionId lp = labels(p.row, p.col);
      const RegionId lq = labels(q.row, q.col);
      if (lp == lq) continue;
      const auto key = RegionPair::of(lp, lq).key();
      auto [it, inserted] = acc.try_emplace(key);
      if (inserted) order.push_back(key);
      it->second.first.add(v);
      it->second.second.push_back(e);
    }
  }
  for (auto key : order) {
    auto& [mean, coords] = acc[key];
    sb.insert(RegionPair::from_key(key), BoundaryEntry{mean.mean(), std::move(coords)});
  }
  return {std::move(labels), std::move(sb)};
}

SparseBoundaries erase_boundary(SparseBoundaries sb, RegionPair pair) {
  sb.erase(pair);
  return sb;
}

LabelMap binarize(const SparseBoundaries& sb, double threshold) {
  const int h = sb.height();
  const int w = sb.width();
  const int cols = 2 * w - 1;
  std::vector<std::uint8_t> barrier(static_cast<std::size_t>(2 * h - 1) * cols, 0);
  sb.for_each([&](RegionPair, const BoundaryEntry& e) {
    if (e.strength > threshold) {
      for (const Edgel& g : e.coords) barrier[static_cast<std::size_t>(g.row) * cols + g.col] = 1;
    }
  });
  return flood_components(h, w, [&](Edgel e) { return barrier[static_cast<std::size_t>(e.row) * cols + e.col] != 0; });
}

LabelMap labels_from_sparse(const SparseBoundaries& sb) {
  const int h = sb.height();
  const int w = sb.width();
  const int cols = 2 * w - 1;
  std::vector<std::uint8_t> barrier(static_cast<std::size_t>(2 * h - 1) * cols, 0);
  sb.for_each([&](RegionPair, const BoundaryEntry& e) {
    for (const Edgel& g : e.coords) {
      if (g.row < 0 || g.col < 0 || g.row >= 2 * h - 1 || g.col >= cols || !is_edgel(g.row, g.col)) {
        throw RepresentationError("coordinate outside the boundary grid");
      }
      barrier[static_cast<std::size_t>(g.row) * cols + g.col] = 1;
    }
  });
  const LabelMap comps =
      flood_components(h, w, [&](Edgel e) { return barrier[static_cast<std::size_t>(e.row) * cols + e.col] != 0; });
  const RegionId n = comps.region_count();
  if (n != sb.region_count()) {
    throw RepresentationError("boundaries enclose " + std::to_string(n) + " components for " +
                              std::to_string(sb.region_count()) + " regions");
  }
  if (n == 1) return comps;

  // Each edgel listed under (a,b) says its two components carry ids {a,b}.
  constexpr RegionId kNone = std::numeric_limits<RegionId>::max();
  std::vector<std::array<RegionId, 2>> cand(n, {kNone, kNone});
  struct Link {
    RegionId other;
    RegionPair pair;
  };
  std::vector<std::vector<Link>> links(n);
  sb.for_each([&](RegionPair p, const BoundaryEntry& e) {
    for (const Edgel& g : e.coords) {
      const auto [u, v] = edgel_pixels(g);
      const RegionId cu = comps(u.row, u.col);
      const RegionId cv = comps(v.row, v.col);
      if (cu == cv) throw RepresentationError("edgel inside a single region");
      for (RegionId c : {cu, cv}) {
        auto& cs = cand[c];
        if (cs[0] == kNone) {
          cs = {p.a, p.b};
        } else {
          std::array<RegionId, 2> keep{kNone, kNone};
          int k = 0;
          for (RegionId x : cs) {
            if (x != kNone && (x == p.a || x == p.b)) keep[k++] = x;
          }
          if (k == 0) throw RepresentationError("contradictory boundary entries around a region");
          cs = keep;
        }
      }
      links[cu].push_back({cv, p});
      links[cv].push_back({cu, p});
    }
  });

  std::vector<RegionId> id(n, kNone);
  std::vector<std::uint8_t> taken(n, 0);
  std::vector<RegionId> queue;
  auto fix = [&](RegionId c, RegionId v) {
    if (id[c] == kNone) {
      id[c] = v;
      taken[v] = 1;
      queue.push_back(c);
    } else if (id[c] != v) {
      throw RepresentationError("boundary entries do not describe a consistent labeling");
    }
  };
  auto propagate = [&] {
    while (!queue.empty()) {
      const RegionId c = queue.back();
      queue.pop_back();
      for (const Link& l : links[c]) {
        if (id[c] != l.pair.a && id[c] != l.pair.b) {
          throw RepresentationError("boundary entries do not describe a consistent labeling");
        }
        fix(l.other, id[c] == l.pair.a ? l.pair.b : l.pair.a);
      }
    }
  };
  for (RegionId c = 0; c < n; ++c) {
    if (cand[c][0] == kNone) throw RepresentationError("region without boundaries in a multi-region table");
    if (cand[c][1] == kNone) fix(c, cand[c][0]);
  }
  propagate();
  // Remaining ambiguity is resolved in raster order.
  for (RegionId c = 0; c < n; ++c) {
    if (id[c] == kNone) {
      const RegionId lo = std::min(cand[c][0], cand[c][1]);
      const RegionId hi = std::max(cand[c][0], cand[c][1]);
      fix(c, taken[lo] ? hi : lo);
      propagate();
    }
  }
  std::vector<std::uint8_t> used(n, 0);
  for (RegionId c = 0; c < n; ++c) {
    if (used[id[c]]) throw RepresentationError("two components resolve to the same region id");
    used[id[c]] = 1;
  }
  std::vector<RegionId> out(comps.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = id[comps.labels()[i]];
  return LabelMap(h, w, std::move(out));
}

void validate(const SparseBoundaries& sb, const LabelMap& labels) {
  if (sb.height() != labels.height() || sb.width() != labels.width()) {
    throw ConsistencyError("sparse boundaries and label map sizes differ");
  }
  if (sb.region_count() != labels.region_count()) throw ConsistencyError("region counts differ");
  const int cols = 2 * labels.width() - 1;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(2 * labels.height() - 1) * cols, 0);
  std::size_t listed = 0;
  sb.for_each([&](RegionPair p, const BoundaryEntry& e) {
    if (e.coords.empty()) throw ConsistencyError("empty coordinate list for " + pair_name(p));
    for (const Edgel& g : e.coords) {
      if (g.row < 0 || g.col < 0 || g.row >= 2 * labels.height() - 1 || g.col >= cols || !is_edgel(g.row, g.col)) {
        throw ConsistencyError("coordinate is not an edgel");
      }
      auto& s = seen[static_cast<std::size_t>(g.row) * cols + g.col];
      if (s) throw ConsistencyError("edgel listed twice");
      s = 1;
      const auto [u, v] = edgel_pixels(g);
      if (RegionPair::of(labels(u.row, u.col), labels(v.row, v.col)) != p) {
        throw ConsistencyError("edgel does not separate pair " + pair_name(p));
      }
      ++listed;
    }
  });
  std::size_t expected = 0;
  for (int r = 0; r < labels.height(); ++r) {
    for (int c = 0; c < labels.width(); ++c) {
      if (c + 1 < labels.width() && labels(r, c) != labels(r, c + 1)) ++expected;
      if (r + 1 < labels.height() && labels(r, c) != labels(r + 1, c)) ++expected;
    }
  }
  if (listed != expected) throw ConsistencyError("coordinate lists do not cover every boundary edgel");
}

}  // namespace cob
