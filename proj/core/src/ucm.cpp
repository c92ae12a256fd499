#include "cob/ucm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <tuple>

namespace cob {

void Hierarchy::validate() const {
  const RegionId r = leaf_count();
  if (r == 0) throw ConsistencyError("hierarchy without leaves");
  if (merges.size() != static_cast<std::size_t>(r) - 1) {
    throw ConsistencyError("hierarchy over " + std::to_string(r) + " regions must have " + std::to_string(r - 1) +
                           " merges, found " + std::to_string(merges.size()));
  }
  std::vector<std::uint8_t> used(2 * static_cast<std::size_t>(r) - 1, 0);
  double previous = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < merges.size(); ++k) {
    const Merge& m = merges[k];
    if (m.parent != r + k) throw ConsistencyError("merge parents must be numbered sequentially from R");
    if (m.a >= m.parent || m.b >= m.parent || m.a == m.b) throw ConsistencyError("merge references a later node");
    if (used[m.a] || used[m.b]) throw ConsistencyError("node merged twice");
    used[m.a] = used[m.b] = 1;
    if (!(m.level >= previous)) throw ConsistencyError("merge levels must be nondecreasing");
    previous = m.level;
  }
}

Hierarchy build_ucm(const SparseBoundaries& input, const LabelMap& finest) {
  if (input.region_count() != finest.region_count() || input.height() != finest.height() ||
      input.width() != finest.width()) {
    throw DimensionError("boundaries and finest partition disagree");
  }
  SparseBoundaries sb = input;
  using Key = std::tuple<double, RegionId, RegionId>;
  std::set<Key> queue;
  sb.for_each([&](RegionPair p, const BoundaryEntry& e) {
    if (!(e.strength >= 0.0 && e.strength <= 1.0)) {
      throw RepresentationError("boundary strengths must lie in [0,1]");
    }
    queue.emplace(e.strength, p.a, p.b);
  });

  const RegionId r = finest.region_count();
  std::vector<RegionId> node(r);
  std::iota(node.begin(), node.end(), RegionId{0});

  Hierarchy h{finest, {}};
  h.merges.reserve(r > 0 ? r - 1 : 0);
  double level = 0.0;
  std::vector<RegionId> touched;
  while (!queue.empty()) {
    const auto [strength, a, b] = *queue.begin();
    queue.erase(queue.begin());
    level = h.merges.empty() ? strength : std::max(level, strength);

    touched.assign(sb.neighbors(b).begin(), sb.neighbors(b).end());
    std::erase(touched, a);
    for (RegionId x : touched) {
      const RegionPair bx = RegionPair::of(b, x);
      queue.erase(Key{sb.at(bx).strength, bx.a, bx.b});
      const RegionPair ax = RegionPair::of(a, x);
      if (const BoundaryEntry* e = sb.find(ax)) queue.erase(Key{e->strength, ax.a, ax.b});
    }
    sb.merge_regions(RegionPair{a, b});
    for (RegionId x : touched) {
      const RegionPair ax = RegionPair::of(a, x);
      queue.emplace(sb.at(ax).strength, ax.a, ax.b);
    }

    const RegionId parent = r + static_cast<RegionId>(h.merges.size());
    h.merges.push_back(Merge{node[a], node[b], parent, level});
    node[a] = parent;
  }
  if (h.merges.size() + 1 != r) throw ConsistencyError("region adjacency graph is disconnected");
  return h;
}

Hierarchy build_ucm(const SparseBoundaries& sb) { return build_ucm(sb, labels_from_sparse(sb)); }

namespace {

RegionId find_root(std::vector<RegionId>& parent, RegionId x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

LabelMap partition_at(const Hierarchy& h, double t) {
  const RegionId r = h.leaf_count();
  std::vector<RegionId> uf(r);
  std::iota(uf.begin(), uf.end(), RegionId{0});
  std::vector<RegionId> rep(2 * static_cast<std::size_t>(r) - 1);
  std::iota(rep.begin(), rep.begin() + r, RegionId{0});
  for (const Merge& m : h.merges) {
    if (m.level > t) break;
    const RegionId x = find_root(uf, rep[m.a]);
    const RegionId y = find_root(uf, rep[m.b]);
    uf[y] = x;
    rep[m.parent] = x;
  }
  std::vector<RegionId> out(h.finest.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = find_root(uf, h.finest.labels()[i]);
  return LabelMap(h.finest.height(), h.finest.width(), std::move(out)).canonical();
}

SparseBoundaries ultrametric_boundaries(const Hierarchy& h) {
  h.validate();
  SparseBoundaries sb = sparse_from_labels(h.finest);
  const std::size_t nodes = 2 * static_cast<std::size_t>(h.leaf_count()) - 1;
  if (nodes == 1) return sb;

  // Binary lifting over the merge tree; parents always have larger ids.
  const int log = std::bit_width(nodes);
  std::vector<std::vector<RegionId>> up(log, std::vector<RegionId>(nodes));
  std::vector<int> depth(nodes, 0);
  std::vector<double> level(nodes, 0.0);
  const RegionId root = static_cast<RegionId>(nodes - 1);
  up[0][root] = root;
  for (const Merge& m : h.merges) {
    up[0][m.a] = m.parent;
    up[0][m.b] = m.parent;
    level[m.parent] = m.level;
  }
  for (std::size_t v = nodes; v-- > 0;) depth[v] = v == root ? 0 : depth[up[0][v]] + 1;
  for (int j = 1; j < log; ++j) {
    for (std::size_t v = 0; v < nodes; ++v) up[j][v] = up[j - 1][up[j - 1][v]];
  }
  auto lca = [&](RegionId u, RegionId v) {
    if (depth[u] < depth[v]) std::swap(u, v);
    for (int j = log - 1; j >= 0; --j) {
      if (depth[u] - (1 << j) >= depth[v]) u = up[j][u];
    }
    if (u == v) return u;
    for (int j = log - 1; j >= 0; --j) {
      if (up[j][u] != up[j][v]) {
        u = up[j][u];
        v = up[j][v];
      }
    }
    return up[0][u];
  };
  sb.for_each_mut([&](RegionPair p, BoundaryEntry& e) { e.strength = level[lca(p.a, p.b)]; });
  return sb;
}

BoundaryGrid ucm_grid(const Hierarchy& h) { return dense_from_sparse(ultrametric_boundaries(h), h.finest); }

LevelSummary level_count(const Hierarchy& h) {
  LevelSummary s;
  for (const Merge& m : h.merges) s.levels.push_back(m.level);
  std::sort(s.levels.begin(), s.levels.end());
  s.levels.erase(std::unique(s.levels.begin(), s.levels.end()), s.levels.end());
  s.count = s.levels.size();
  return s;
}

}  // namespace cob
