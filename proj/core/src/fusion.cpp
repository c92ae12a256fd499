#include "cob/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace cob {

double default_projection_radius(int height, int width) {
  return 0.0075 * std::hypot(static_cast<double>(height), static_cast<double>(width));
}

namespace {

// Uniform bucket index over coarse boundary edgels, in grid units.
class EdgelIndex {
 public:
  EdgelIndex(const SparseBoundaries& coarse, double radius) : reach_(2.0 * radius) {
    rows_ = 2 * coarse.height() - 1;
    cols_ = 2 * coarse.width() - 1;
    cell_ = std::max(1, static_cast<int>(std::ceil(reach_)));
    brows_ = rows_ / cell_ + 1;
    bcols_ = cols_ / cell_ + 1;
    std::vector<std::size_t> counts(static_cast<std::size_t>(brows_) * bcols_ + 1, 0);
    coarse.for_each([&](RegionPair, const BoundaryEntry& e) {
      if (!(e.strength > 0.0)) return;
      for (const Edgel& g : e.coords) ++counts[bucket(g) + 1];
    });
    for (std::size_t i = 1; i < counts.size(); ++i) counts[i] += counts[i - 1];
    start_ = counts;
    items_.resize(counts.back());
    coarse.for_each([&](RegionPair, const BoundaryEntry& e) {
      if (!(e.strength > 0.0)) return;
      for (const Edgel& g : e.coords) items_[counts[bucket(g)]++] = {g, e.strength};
    });
  }

  // Level of the nearest indexed edgel within reach, or 0.
  double nearest(Edgel q) const {
    const long max_d2 = static_cast<long>(std::floor(reach_ * reach_ + 1e-9));
    const int br = q.row / cell_;
    const int bc = q.col / cell_;
    long best_d2 = std::numeric_limits<long>::max();
    Edgel best_cell{};
    double best = 0.0;
    for (int r = std::max(0, br - 1); r <= std::min(brows_ - 1, br + 1); ++r) {
      for (int c = std::max(0, bc - 1); c <= std::min(bcols_ - 1, bc + 1); ++c) {
        const std::size_t b = static_cast<std::size_t>(r) * bcols_ + c;
        for (std::size_t i = start_[b]; i < start_[b + 1]; ++i) {
          const auto& [g, level] = items_[i];
          const long dr = g.row - q.row;
          const long dc = g.col - q.col;
          const long d2 = dr * dr + dc * dc;
          if (d2 > max_d2) continue;
          if (d2 < best_d2 || (d2 == best_d2 && g < best_cell)) {
            best_d2 = d2;
            best_cell = g;
            best = level;
          }
        }
      }
    }
    return best;
  }

 private:
  std::size_t bucket(Edgel g) const { return static_cast<std::size_t>(g.row / cell_) * bcols_ + g.col / cell_; }

  double reach_;
  int rows_ = 0, cols_ = 0, cell_ = 1, brows_ = 1, bcols_ = 1;
  std::vector<std::size_t> start_;
  std::vector<std::pair<Edgel, double>> items_;
};

}  // namespace

SparseBoundaries project(const Hierarchy& coarse, const SparseBoundaries& fine_sb, double radius) {
  if (coarse.finest.height() != fine_sb.height() || coarse.finest.width() != fine_sb.width()) {
    throw DimensionError("coarse hierarchy and fine boundaries have different sizes");
  }
  if (radius < 0.0) throw std::invalid_argument("projection radius must be non-negative");
  const EdgelIndex index(ultrametric_boundaries(coarse), radius);
  SparseBoundaries out = fine_sb;
  out.for_each_mut([&](RegionPair, BoundaryEntry& e) {
    MeanAccumulator mean;
    for (const Edgel& g : e.coords) mean.add(index.nearest(g));
    e.strength = mean.mean();
  });
  return out;
}

double fuse_strengths(std::span<const double> strengths, std::span<const double> weights) {
  std::vector<std::pair<double, double>> terms;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < strengths.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    terms.emplace_back(strengths[i], weights[i]);
    lo = std::min(lo, strengths[i]);
    hi = std::max(hi, strengths[i]);
  }
  if (terms.empty()) return 0.0;
  if (lo == hi) return lo;
  // Sorting first makes every sum independent of the order of the scales.
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (const auto& term : terms) total += term.second;
  double sum = 0.0;
  for (const auto& [s, w] : terms) sum += s * (w / total);
  return std::clamp(sum, lo, hi);
}

SparseBoundaries fused_boundaries(std::span<const ScaleMember> scales, const SparseBoundaries& fine_sb,
                                  double radius) {
  if (scales.empty()) throw std::invalid_argument("fusion needs at least one scale");
  std::vector<double> weights;
  double total = 0.0;
  for (const ScaleMember& s : scales) {
    if (s.weight < 0.0 || !std::isfinite(s.weight)) throw std::invalid_argument("scale weights must be >= 0");
    weights.push_back(s.weight);
    total += s.weight;
  }
  if (total <= 0.0) throw std::invalid_argument("scale weights are all zero");

  std::vector<SparseBoundaries> projected;
  projected.reserve(scales.size());
  for (const ScaleMember& s : scales) projected.push_back(project(s.hierarchy, fine_sb, radius));

  SparseBoundaries out = fine_sb;
  std::vector<double> strengths(scales.size());
  out.for_each_mut([&](RegionPair p, BoundaryEntry& e) {
    for (std::size_t i = 0; i < projected.size(); ++i) strengths[i] = projected[i].at(p).strength;
    e.strength = fuse_strengths(strengths, weights);
  });
  return out;
}

Hierarchy fuse(std::span<const ScaleMember> scales, const SparseBoundaries& fine_sb, const LabelMap& fine_labels,
               double radius) {
  return build_ucm(fused_boundaries(scales, fine_sb, radius), fine_labels);
}

Hierarchy fuse(std::span<const ScaleMember> scales, const SparseBoundaries& fine_sb, double radius) {
  return fuse(scales, fine_sb, labels_from_sparse(fine_sb), radius);
}

}  // namespace cob
