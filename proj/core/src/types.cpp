#include "cob/types.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace cob {

FloatMap::FloatMap(int height, int width, int channels, float fill)
    : height_(height), width_(width), channels_(channels) {
  if (height <= 0 || width <= 0 || channels <= 0) {
    throw DimensionError("FloatMap dimensions must be positive");
  }
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

std::size_t BoolMap::count() const {
  return static_cast<std::size_t>(std::count_if(data.begin(), data.end(), [](auto v) { return v != 0; }));
}

LabelMap::LabelMap(int height, int width, std::vector<RegionId> labels)
    : height_(height), width_(width), labels_(std::move(labels)) {
  if (height <= 0 || width <= 0) {
    throw RepresentationError("label map must have positive height and width");
  }
  if (labels_.size() != static_cast<std::size_t>(height) * width) {
    throw RepresentationError("label buffer size does not match " + std::to_string(height) + "x" +
                              std::to_string(width));
  }
  region_count_ = *std::max_element(labels_.begin(), labels_.end()) + 1;
}

namespace {

// 4-connected components of pixels sharing the same label.
std::vector<RegionId> label_components(const LabelMap& lm, RegionId& count) {
  const int h = lm.height();
  const int w = lm.width();
  constexpr RegionId kUnset = std::numeric_limits<RegionId>::max();
  std::vector<RegionId> comp(lm.size(), kUnset);
  std::vector<int> stack;
  count = 0;
  for (int start = 0; start < h * w; ++start) {
    if (comp[start] != kUnset) continue;
    const RegionId id = lm.labels()[start];
    comp[start] = count;
    stack.push_back(start);
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      const int r = p / w;
      const int c = p % w;
      auto visit = [&](int q) {
        if (comp[q] == kUnset && lm.labels()[q] == id) {
          comp[q] = count;
          stack.push_back(q);
        }
      };
      if (r > 0) visit(p - w);
      if (r + 1 < h) visit(p + w);
      if (c > 0) visit(p - 1);
      if (c + 1 < w) visit(p + 1);
    }
    ++count;
  }
  return comp;
}

}  // namespace

void LabelMap::validate() const {
  if (labels_.empty()) throw RepresentationError("empty label map");
  std::vector<std::uint8_t> seen(region_count_, 0);
  for (RegionId l : labels_) seen[l] = 1;
  for (RegionId id = 0; id < region_count_; ++id) {
    if (!seen[id]) {
      throw RepresentationError("region ids are not contiguous: id " + std::to_string(id) + " is missing");
    }
  }
  RegionId components = 0;
  label_components(*this, components);
  if (components != region_count_) {
    throw RepresentationError("label map has " + std::to_string(components) +
                              " connected components for " + std::to_string(region_count_) +
                              " region ids");
  }
}

bool LabelMap::is_valid() const {
  try {
    validate();
    return true;
  } catch (const RepresentationError&) {
    return false;
  }
}

LabelMap LabelMap::canonical() const {
  constexpr RegionId kUnset = std::numeric_limits<RegionId>::max();
  std::vector<RegionId> remap(region_count_, kUnset);
  std::vector<RegionId> out(labels_.size());
  RegionId next = 0;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    RegionId& m = remap[labels_[i]];
    if (m == kUnset) m = next++;
    out[i] = m;
  }
  return LabelMap(height_, width_, std::move(out));
}

bool same_partition(const LabelMap& a, const LabelMap& b) {
  if (a.height() != b.height() || a.width() != b.width()) return false;
  return a.canonical().labels() == b.canonical().labels();
}

bool is_coarsening(const LabelMap& fine, const LabelMap& coarse) {
  if (fine.height() != coarse.height() || fine.width() != coarse.width()) return false;
  constexpr RegionId kUnset = std::numeric_limits<RegionId>::max();
  std::vector<RegionId> parent(fine.region_count(), kUnset);
  for (std::size_t i = 0; i < fine.size(); ++i) {
    RegionId& p = parent[fine.labels()[i]];
    if (p == kUnset) {
      p = coarse.labels()[i];
    } else if (p != coarse.labels()[i]) {
      return false;
    }
  }
  return true;
}

std::pair<Pixel, Pixel> edgel_pixels(Edgel e) {
  if (e.is_vertical()) {
    const int r = e.row / 2;
    return {Pixel{r, (e.col - 1) / 2}, Pixel{r, (e.col + 1) / 2}};
  }
  const int c = e.col / 2;
  return {Pixel{(e.row - 1) / 2, c}, Pixel{(e.row + 1) / 2, c}};
}

std::pair<Edgel, Edgel> edgel_junctions(Edgel e) {
  if (e.is_vertical()) return {Edgel{e.row - 1, e.col}, Edgel{e.row + 1, e.col}};
  return {Edgel{e.row, e.col - 1}, Edgel{e.row, e.col + 1}};
}

bool is_edgel(int grid_row, int grid_col) { return ((grid_row + grid_col) & 1) == 1; }

BoundaryGrid::BoundaryGrid(int height, int width) : height_(height), width_(width) {
  if (height <= 0 || width <= 0) throw DimensionError("boundary grid needs a non-empty image");
  values_.assign(static_cast<std::size_t>(rows()) * cols(), 0.0);
}

FloatMap BoundaryGrid::to_float_map() const {
  FloatMap out(rows(), cols(), 1);
  std::transform(values_.begin(), values_.end(), out.data().begin(),
                 [](double v) { return static_cast<float>(v); });
  return out;
}

BoundaryGrid BoundaryGrid::from_float_map(const FloatMap& grid) {
  if (grid.channels() != 1 || grid.height() % 2 == 0 || grid.width() % 2 == 0) {
    throw DimensionError("a boundary grid must be a single-channel (2H-1)x(2W-1) map");
  }
  BoundaryGrid out((grid.height() + 1) / 2, (grid.width() + 1) / 2);
  std::copy(grid.data().begin(), grid.data().end(), out.values_.begin());
  return out;
}

BoolMap boundary_pixels(const BoundaryGrid& grid, double threshold) {
  BoolMap out(grid.height(), grid.width());
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      const bool east = c + 1 < grid.width() && grid(2 * r, 2 * c + 1) > threshold;
      const bool south = r + 1 < grid.height() && grid(2 * r + 1, 2 * c) > threshold;
      out(r, c) = (east || south) ? 1 : 0;
    }
  }
  return out;
}

BoolMap boundary_pixels(const LabelMap& labels) {
  BoolMap out(labels.height(), labels.width());
  for (int r = 0; r < labels.height(); ++r) {
    for (int c = 0; c < labels.width(); ++c) {
      const bool east = c + 1 < labels.width() && labels(r, c) != labels(r, c + 1);
      const bool south = r + 1 < labels.height() && labels(r, c) != labels(r + 1, c);
      out(r, c) = (east || south) ? 1 : 0;
    }
  }
  return out;
}

void MeanAccumulator::add(double v) {
  if (count_ == 0) {
    min_ = max_ = v;
  } else {
    min_ = std::min(min_, v);
    max_ = std::max(max_, v);
  }
  sum_ += v;
  ++count_;
}

double MeanAccumulator::mean() const {
  if (count_ == 0) return 0.0;
  if (min_ == max_) return min_;
  return std::clamp(sum_ / static_cast<double>(count_), min_, max_);
}

double combine_strength(double s1, std::size_t n1, double s2, std::size_t n2) {
  if (s1 == s2) return s1;
  const double n = static_cast<double>(n1 + n2);
  const double v = (s1 * static_cast<double>(n1) + s2 * static_cast<double>(n2)) / n;
  return std::clamp(v, std::min(s1, s2), std::max(s1, s2));
}

}  // namespace cob
