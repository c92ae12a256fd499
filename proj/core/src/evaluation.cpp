#include "cob/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

namespace cob {

int GroundTruthSet::height() const { return annotations.empty() ? 0 : annotations.front().height(); }
int GroundTruthSet::width() const { return annotations.empty() ? 0 : annotations.front().width(); }

void GroundTruthSet::validate() const {
  if (annotations.empty()) throw std::invalid_argument("ground truth needs at least one annotation");
  for (const LabelMap& a : annotations) {
    if (a.height() != height() || a.width() != width()) throw DimensionError("annotations differ in size");
  }
}

double f_measure(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

double Counts::f_measure() const { return cob::f_measure(precision(), recall()); }

Counts& Counts::operator+=(const Counts& o) {
  p_num += o.p_num;
  p_den += o.p_den;
  r_num += o.r_num;
  r_den += o.r_den;
  return *this;
}

BoolMap thin(const BoolMap& map) {
  BoolMap out = map;
  const int h = map.height;
  const int w = map.width;
  auto at = [&](int r, int c) -> int {
    return r >= 0 && r < h && c >= 0 && c < w && out(r, c) ? 1 : 0;
  };
  std::vector<std::size_t> drop;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      drop.clear();
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          if (!out(r, c)) continue;
          // Neighbors P2..P9 clockwise from north.
          const int p[8] = {at(r - 1, c), at(r - 1, c + 1), at(r, c + 1), at(r + 1, c + 1),
                            at(r + 1, c), at(r + 1, c - 1), at(r, c - 1), at(r - 1, c - 1)};
          const int b = std::accumulate(p, p + 8, 0);
          if (b < 2 || b > 6) continue;
          int a = 0;
          for (int i = 0; i < 8; ++i) a += (p[i] == 0 && p[(i + 1) % 8] == 1);
          if (a != 1) continue;
          if (pass == 0) {
            if (p[0] * p[2] * p[4] != 0 || p[2] * p[4] * p[6] != 0) continue;
          } else {
            if (p[0] * p[2] * p[6] != 0 || p[0] * p[4] * p[6] != 0) continue;
          }
          drop.push_back(static_cast<std::size_t>(r) * w + c);
        }
      }
      for (std::size_t i : drop) out.data[i] = 0;
      changed = changed || !drop.empty();
    }
  }
  return out;
}

namespace {

struct PixelList {
  std::vector<int> rows;
  std::vector<int> cols;
  std::vector<int> index_of;  // per pixel, position in the list or -1
};

PixelList list_pixels(const BoolMap& m) {
  PixelList l;
  l.index_of.assign(m.data.size(), -1);
  for (int r = 0; r < m.height; ++r) {
    for (int c = 0; c < m.width; ++c) {
      if (!m(r, c)) continue;
      l.index_of[static_cast<std::size_t>(r) * m.width + c] = static_cast<int>(l.rows.size());
      l.rows.push_back(r);
      l.cols.push_back(c);
    }
  }
  return l;
}

// Hopcroft-Karp over a CSR bipartite graph, started from an initial matching.
class BipartiteMatcher {
 public:
  BipartiteMatcher(std::size_t left, std::size_t right, const std::vector<std::size_t>& start,
                   const std::vector<int>& adj)
      : start_(start), adj_(adj), match_left_(left, -1), match_right_(right, -1), dist_(left) {}

  void seed(int u, int v) {
    match_left_[u] = v;
    match_right_[v] = u;
  }

  void run() {
    while (bfs()) {
      for (std::size_t u = 0; u < match_left_.size(); ++u) {
        if (match_left_[u] < 0) dfs(static_cast<int>(u));
      }
    }
  }

  const std::vector<int>& match_left() const { return match_left_; }
  bool right_free(int v) const { return match_right_[v] < 0; }
  bool left_free(int u) const { return match_left_[u] < 0; }

 private:
  static constexpr int kInf = std::numeric_limits<int>::max();

  bool bfs() {
    std::deque<int> q;
    for (std::size_t u = 0; u < match_left_.size(); ++u) {
      if (match_left_[u] < 0) {
        dist_[u] = 0;
        q.push_back(static_cast<int>(u));
      } else {
        dist_[u] = kInf;
      }
    }
    bool found = false;
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      for (std::size_t i = start_[u]; i < start_[u + 1]; ++i) {
        const int w = match_right_[adj_[i]];
        if (w < 0) {
          found = true;
        } else if (dist_[w] == kInf) {
          dist_[w] = dist_[u] + 1;
          q.push_back(w);
        }
      }
    }
    return found;
  }

  bool dfs(int u) {
    for (std::size_t i = start_[u]; i < start_[u + 1]; ++i) {
      const int v = adj_[i];
      const int w = match_right_[v];
      if (w < 0 || (dist_[w] == dist_[u] + 1 && dfs(w))) {
        match_left_[u] = v;
        match_right_[v] = u;
        return true;
      }
    }
    dist_[u] = kInf;
    return false;
  }

  const std::vector<std::size_t>& start_;
  const std::vector<int>& adj_;
  std::vector<int> match_left_;
  std::vector<int> match_right_;
  std::vector<int> dist_;
};

}  // namespace

namespace {

// Maximum one-to-one matching between the pixels of `pred` and the pixels of
// every map in `gts` (each annotation contributes its own right-hand nodes).
// Edges join pixels at distance <= radius; they are first matched greedily
// nearest-first and then completed by augmenting paths. Returns, per pred
// pixel, the matched right node or -1, with right nodes numbered annotation
// by annotation.
std::vector<int> maximum_matching(const PixelList& p, const std::vector<PixelList>& gts, int height, int width,
                                  double radius) {
  const int reach = static_cast<int>(std::floor(radius));
  const double r2 = radius * radius + 1e-9;
  std::vector<int> offset(gts.size() + 1, 0);
  for (std::size_t k = 0; k < gts.size(); ++k) offset[k + 1] = offset[k] + static_cast<int>(gts[k].rows.size());

  struct Candidate {
    int d2;
    int u;
    int v;
  };
  std::vector<Candidate> cand;
  std::vector<std::size_t> start(p.rows.size() + 1, 0);
  std::vector<int> adj;
  for (std::size_t u = 0; u < p.rows.size(); ++u) {
    const int r0 = p.rows[u];
    const int c0 = p.cols[u];
    for (std::size_t k = 0; k < gts.size(); ++k) {
      for (int r = std::max(0, r0 - reach); r <= std::min(height - 1, r0 + reach); ++r) {
        for (int c = std::max(0, c0 - reach); c <= std::min(width - 1, c0 + reach); ++c) {
          const int v = gts[k].index_of[static_cast<std::size_t>(r) * width + c];
          if (v < 0) continue;
          const int d2 = (r - r0) * (r - r0) + (c - c0) * (c - c0);
          if (d2 > r2) continue;
          adj.push_back(offset[k] + v);
          cand.push_back({d2, static_cast<int>(u), offset[k] + v});
        }
      }
    }
    start[u + 1] = adj.size();
  }
  std::sort(cand.begin(), cand.end(),
            [](const Candidate& x, const Candidate& y) { return std::tie(x.d2, x.u, x.v) < std::tie(y.d2, y.u, y.v); });
  BipartiteMatcher m(p.rows.size(), static_cast<std::size_t>(offset.back()), start, adj);
  for (const Candidate& e : cand) {
    if (m.left_free(e.u) && m.right_free(e.v)) m.seed(e.u, e.v);
  }
  m.run();
  return m.match_left();
}

}  // namespace

PixelMatch match_pixels(const BoolMap& pred, const BoolMap& gt, double radius) {
  if (pred.height != gt.height || pred.width != gt.width) throw DimensionError("boundary maps differ in size");
  if (radius < 0.0) throw std::invalid_argument("matching radius must be non-negative");
  const std::vector<int> match = maximum_matching(list_pixels(pred), {list_pixels(gt)}, gt.height, gt.width, radius);
  PixelMatch out;
  for (std::size_t u = 0; u < match.size(); ++u) {
    if (match[u] < 0) continue;
    out.pred_index.push_back(u);
    out.gt_index.push_back(static_cast<std::size_t>(match[u]));
  }
  return out;
}

Counts match_boundaries(const BoolMap& pred, std::span<const BoolMap> gt_maps, double max_dist) {
  if (!(max_dist > 0.0 && max_dist < 1.0)) throw std::invalid_argument("max_dist must lie in (0,1)");
  if (gt_maps.empty()) throw std::invalid_argument("ground truth needs at least one annotation");
  const double radius = max_dist * std::hypot(static_cast<double>(pred.height), static_cast<double>(pred.width));
  const PixelList p = list_pixels(pred);
  std::vector<PixelList> all;
  Counts counts;
  counts.p_den = static_cast<double>(p.rows.size());
  for (const BoolMap& gt : gt_maps) {
    if (gt.height != pred.height || gt.width != pred.width) throw DimensionError("boundary maps differ in size");
    all.push_back(list_pixels(gt));
    const std::vector<int> own = maximum_matching(p, {all.back()}, gt.height, gt.width, radius);
    counts.r_num += static_cast<double>(std::count_if(own.begin(), own.end(), [](int v) { return v >= 0; }));
    counts.r_den += static_cast<double>(all.back().rows.size());
  }
  // A predicted pixel is a hit when it can be matched within some annotation;
  // one joint matching over all annotations keeps the count monotone in radius.
  const std::vector<int> joint = maximum_matching(p, all, pred.height, pred.width, radius);
  counts.p_num = static_cast<double>(std::count_if(joint.begin(), joint.end(), [](int v) { return v >= 0; }));
  return counts;
}

std::vector<BoolMap> gt_boundary_maps(const GroundTruthSet& gts) {
  gts.validate();
  std::vector<BoolMap> maps;
  for (const LabelMap& a : gts.annotations) maps.push_back(thin(boundary_pixels(a)));
  return maps;
}

Counts match_boundaries(const BoolMap& pred, const GroundTruthSet& gts, double max_dist) {
  const auto maps = gt_boundary_maps(gts);
  return match_boundaries(thin(pred), maps, max_dist);
}

Counts region_counts(const LabelMap& partition, const GroundTruthSet& gts, const RegionMeasureParams& params) {
  gts.validate();
  if (partition.height() != gts.height() || partition.width() != gts.width()) {
    throw DimensionError("partition and ground truth differ in size");
  }
  Counts counts;
  const RegionId ns = partition.region_count();
  std::vector<double> size_s(ns, 0.0);
  for (RegionId l : partition.labels()) size_s[l] += 1.0;
  for (const LabelMap& gt : gts.annotations) {
    const RegionId ng = gt.region_count();
    std::vector<double> size_g(ng, 0.0);
    std::unordered_map<std::uint64_t, double> overlap;
    for (std::size_t i = 0; i < partition.size(); ++i) {
      const RegionId s = partition.labels()[i];
      const RegionId g = gt.labels()[i];
      size_g[g] += 1.0;
      overlap[(static_cast<std::uint64_t>(s) << 32) | g] += 1.0;
    }
    // 0 = unmatched, 1 = part, 2 = object.
    std::vector<int> class_s(ns, 0), class_g(ng, 0);
    for (const auto& [key, n] : overlap) {
      const auto s = static_cast<RegionId>(key >> 32);
      const auto g = static_cast<RegionId>(key & 0xffffffffu);
      const double in_s = n / size_s[s];
      const double in_g = n / size_g[g];
      if (in_s >= params.object_overlap && in_g >= params.object_overlap) {
        class_s[s] = class_g[g] = 2;
      } else if (std::max(in_s, in_g) >= params.object_overlap && std::min(in_s, in_g) >= params.part_overlap) {
        class_s[s] = std::max(class_s[s], 1);
        class_g[g] = std::max(class_g[g], 1);
      }
    }
    auto credit = [&](const std::vector<int>& cls) {
      double v = 0.0;
      for (int c : cls) v += c == 2 ? 1.0 : c == 1 ? params.part_weight : 0.0;
      return v;
    };
    counts.p_num += credit(class_s);
    counts.p_den += static_cast<double>(ns);
    counts.r_num += credit(class_g);
    counts.r_den += static_cast<double>(ng);
  }
  return counts;
}

RegionScore region_measure(const LabelMap& partition, const GroundTruthSet& gts, const RegionMeasureParams& params) {
  const Counts c = region_counts(partition, gts, params);
  return {c.precision(), c.recall(), c.f_measure()};
}

std::vector<double> threshold_grid(std::span<const double> levels, std::size_t max_count) {
  if (max_count < 2) throw std::invalid_argument("threshold grid needs at least two points");
  std::vector<double> distinct;
  for (double l : levels) {
    if (l > 0.0) distinct.push_back(l);
  }
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<double> grid{0.0};
  if (distinct.size() <= max_count) {
    grid.insert(grid.end(), distinct.begin(), distinct.end());
    return grid;
  }
  const double last = static_cast<double>(distinct.size() - 1);
  for (std::size_t i = 0; i < max_count; ++i) {
    const auto at = static_cast<std::size_t>(std::llround(last * static_cast<double>(i) / (max_count - 1)));
    if (distinct[at] != grid.back()) grid.push_back(distinct[at]);
  }
  return grid;
}

namespace {

void check_thresholds(std::span<const double> thresholds) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) throw std::invalid_argument("thresholds must be ascending");
  if (!thresholds.empty() && thresholds.front() < 0.0) throw std::invalid_argument("thresholds must be >= 0");
}

}  // namespace

std::vector<Counts> boundary_counts(const BoundaryGrid& ucm, const GroundTruthSet& gts,
                                    std::span<const double> thresholds, double max_dist) {
  check_thresholds(thresholds);
  const auto maps = gt_boundary_maps(gts);
  if (ucm.height() != gts.height() || ucm.width() != gts.width()) {
    throw DimensionError("boundary map and ground truth differ in size");
  }
  std::vector<Counts> out;
  out.reserve(thresholds.size());
  BoolMap previous;
  for (double t : thresholds) {
    BoolMap pred = thin(boundary_pixels(ucm, t));
    if (!out.empty() && pred == previous) {
      out.push_back(out.back());
      continue;
    }
    out.push_back(match_boundaries(pred, maps, max_dist));
    previous = std::move(pred);
  }
  return out;
}

std::vector<Counts> region_counts_curve(const Hierarchy& h, const GroundTruthSet& gts,
                                        std::span<const double> thresholds, const RegionMeasureParams& params) {
  check_thresholds(thresholds);
  std::vector<Counts> out;
  out.reserve(thresholds.size());
  std::size_t previous_merges = std::numeric_limits<std::size_t>::max();
  for (double t : thresholds) {
    const auto applied = static_cast<std::size_t>(
        std::count_if(h.merges.begin(), h.merges.end(), [t](const Merge& m) { return m.level <= t; }));
    if (applied == previous_merges) {
      out.push_back(out.back());
      continue;
    }
    out.push_back(region_counts(partition_at(h, t), gts, params));
    previous_merges = applied;
  }
  return out;
}

namespace {

// F of the summed counts when image k uses threshold index choice[k].
double joint_f(std::span<const std::vector<Counts>> per_image, const std::vector<std::size_t>& choice) {
  Counts sum;
  for (std::size_t k = 0; k < per_image.size(); ++k) sum += per_image[k][choice[k]];
  return sum.f_measure();
}

// Per-image thresholds: every image starts at its own best threshold (or at
// the shared ODS threshold when that scores higher overall), then each image
// in turn moves to the threshold that most improves the dataset F until no
// move helps. The result never falls below ODS.
double optimal_image_scale_f(std::span<const std::vector<Counts>> per_image, std::size_t ods_index) {
  const std::size_t n = per_image.front().size();
  std::vector<std::size_t> choice(per_image.size());
  for (std::size_t k = 0; k < per_image.size(); ++k) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (per_image[k][i].f_measure() > per_image[k][best].f_measure()) best = i;
    }
    choice[k] = best;
  }
  double f = joint_f(per_image, choice);
  const std::vector<std::size_t> shared(per_image.size(), ods_index);
  if (const double f_shared = joint_f(per_image, shared); f_shared > f) {
    choice = shared;
    f = f_shared;
  }
  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t k = 0; k < per_image.size(); ++k) {
      Counts rest;
      for (std::size_t j = 0; j < per_image.size(); ++j) {
        if (j != k) rest += per_image[j][choice[j]];
      }
      for (std::size_t i = 0; i < n; ++i) {
        Counts trial = rest;
        trial += per_image[k][i];
        if (trial.f_measure() > f) {
          f = trial.f_measure();
          choice[k] = i;
          improved = true;
        }
      }
    }
  }
  return f;
}

}  // namespace

PRCurve summarize(std::span<const double> thresholds, std::span<const std::vector<Counts>> per_image) {
  PRCurve curve;
  const std::size_t n = thresholds.size();
  for (const auto& image : per_image) {
    if (image.size() != n) throw DimensionError("per-image counts do not match the threshold list");
  }
  if (n == 0) return curve;

  std::vector<Counts> total(n);
  for (const auto& image : per_image) {
    for (std::size_t i = 0; i < n; ++i) total[i] += image[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double p = total[i].precision();
    const double r = total[i].recall();
    curve.points.push_back({thresholds[i], p, r, f_measure(p, r)});
    if (i == 0 || curve.points[i].f > curve.ods_f) {
      curve.ods_f = curve.points[i].f;
      curve.ods_threshold = thresholds[i];
    }
  }

  if (!per_image.empty()) {
    const std::size_t ods_index = static_cast<std::size_t>(
        std::find(thresholds.begin(), thresholds.end(), curve.ods_threshold) - thresholds.begin());
    curve.ois_f = optimal_image_scale_f(per_image, ods_index);
  }

  double ap = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double r = k / 100.0;
    double best = 0.0;
    for (const PRPoint& pt : curve.points) {
      if (pt.recall >= r - 1e-12) best = std::max(best, pt.precision);
    }
    ap += best;
  }
  curve.ap = ap / 101.0;
  return curve;
}

PRCurve pr_curve_boundary(const BoundaryGrid& ucm, const GroundTruthSet& gts, std::span<const double> thresholds,
                          double max_dist) {
  const std::vector<std::vector<Counts>> per_image{boundary_counts(ucm, gts, thresholds, max_dist)};
  return summarize(thresholds, per_image);
}

PRCurve pr_curve_region(const Hierarchy& h, const GroundTruthSet& gts, std::span<const double> thresholds,
                        const RegionMeasureParams& params) {
  const std::vector<std::vector<Counts>> per_image{region_counts_curve(h, gts, thresholds, params)};
  return summarize(thresholds, per_image);
}

}  // namespace cob
