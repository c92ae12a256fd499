#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cob {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed partition: non-contiguous ids, disconnected regions, bad sizes.
class RepresentationError : public Error {
 public:
  using Error::Error;
};

// Two structures that must agree do not (e.g. an edgel listed twice).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// Unknown region pair or id.
class LookupError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Unreadable or malformed file.
class FormatError : public Error {
 public:
  using Error::Error;
};

using RegionId = std::uint32_t;

// ---------------------------------------------------------------------------
// Dense maps
// ---------------------------------------------------------------------------

// H x W x C grid of floats stored channel-major, row-major within a channel.
class FloatMap {
 public:
  FloatMap() = default;
  FloatMap(int height, int width, int channels = 1, float fill = 0.0f);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t plane_size() const { return static_cast<std::size_t>(height_) * width_; }
  bool empty() const { return data_.empty(); }

  float& operator()(int r, int c, int ch = 0) { return data_[index(r, c, ch)]; }
  float operator()(int r, int c, int ch = 0) const { return data_[index(r, c, ch)]; }

  std::span<float> channel(int ch) { return {data_.data() + ch * plane_size(), plane_size()}; }
  std::span<const float> channel(int ch) const {
    return {data_.data() + ch * plane_size(), plane_size()};
  }

  std::vector<float>& data() { return data_; }
  const std::vector<float>& data() const { return data_; }

  bool operator==(const FloatMap&) const = default;

 private:
  std::size_t index(int r, int c, int ch) const {
    return ch * plane_size() + static_cast<std::size_t>(r) * width_ + c;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

// Binary H x W map (boundary pixels, masks).
struct BoolMap {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;

  BoolMap() = default;
  BoolMap(int h, int w) : height(h), width(w), data(static_cast<std::size_t>(h) * w, 0) {}

  std::uint8_t& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * width + c]; }
  std::uint8_t operator()(int r, int c) const {
    return data[static_cast<std::size_t>(r) * width + c];
  }
  std::size_t count() const;
  bool operator==(const BoolMap&) const = default;
};

// Pixel-labeling partition: every pixel carries a region id in 0..R-1.
class LabelMap {
 public:
  LabelMap() = default;
  // region_count is derived as max(label) + 1. Throws RepresentationError on
  // a zero-sized image or a size mismatch; does not check connectivity.
  LabelMap(int height, int width, std::vector<RegionId> labels);

  int height() const { return height_; }
  int width() const { return width_; }
  RegionId region_count() const { return region_count_; }
  std::size_t size() const { return labels_.size(); }

  RegionId operator()(int r, int c) const {
    return labels_[static_cast<std::size_t>(r) * width_ + c];
  }
  const std::vector<RegionId>& labels() const { return labels_; }

  // Contiguous ids and one 4-connected component per id.
  void validate() const;
  bool is_valid() const;

  // Ids renumbered in order of first appearance in a raster scan.
  LabelMap canonical() const;

  bool operator==(const LabelMap&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  RegionId region_count_ = 0;
  std::vector<RegionId> labels_;
};

// True when a and b describe the same partition up to a permutation of ids.
bool same_partition(const LabelMap& a, const LabelMap& b);

// True when every region of `fine` lies inside exactly one region of `coarse`.
bool is_coarsening(const LabelMap& fine, const LabelMap& coarse);

// ---------------------------------------------------------------------------
// Boundary grid geometry
// ---------------------------------------------------------------------------
//
// An H x W image maps onto a (2H-1) x (2W-1) grid. Pixel (r, c) sits at
// (2r, 2c); an edgel between horizontally adjacent pixels sits at
// (2r, 2c+1), between vertically adjacent pixels at (2r+1, 2c); cells with
// both coordinates odd are junctions.

struct Edgel {
  std::int32_t row = 0;
  std::int32_t col = 0;

  auto operator<=>(const Edgel&) const = default;

  // Boundary runs vertically (separates left/right pixels).
  bool is_vertical() const { return (row % 2) == 0; }
};

struct Pixel {
  int row = 0;
  int col = 0;
  auto operator<=>(const Pixel&) const = default;
};

// The two pixels separated by an edgel, in raster order.
std::pair<Pixel, Pixel> edgel_pixels(Edgel e);

// The two junction cells at the ends of an edgel (may lie outside the grid).
std::pair<Edgel, Edgel> edgel_junctions(Edgel e);

bool is_edgel(int grid_row, int grid_col);

// Dense boundary grid of an H x W image. Values are in [0,1]; edgel value 0
// means "no boundary", otherwise it is the threshold at which it disappears.
class BoundaryGrid {
 public:
  BoundaryGrid() = default;
  BoundaryGrid(int height, int width);

  int height() const { return height_; }
  int width() const { return width_; }
  int rows() const { return 2 * height_ - 1; }
  int cols() const { return 2 * width_ - 1; }

  double& operator()(int gr, int gc) { return values_[static_cast<std::size_t>(gr) * cols() + gc]; }
  double operator()(int gr, int gc) const {
    return values_[static_cast<std::size_t>(gr) * cols() + gc];
  }
  double& operator[](Edgel e) { return (*this)(e.row, e.col); }
  double operator[](Edgel e) const { return (*this)(e.row, e.col); }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  // Single-channel float export of the whole grid.
  FloatMap to_float_map() const;
  static BoundaryGrid from_float_map(const FloatMap& grid);

  bool operator==(const BoundaryGrid&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> values_;
};

// Pixel boundary map of a grid thresholded at t: pixel (r,c) is on when its
// east or south edgel has value > t.
BoolMap boundary_pixels(const BoundaryGrid& grid, double threshold);

// Same convention applied to a partition: label differs from east or south.
BoolMap boundary_pixels(const LabelMap& labels);

// ---------------------------------------------------------------------------
// Small numeric helpers shared by several modules
// ---------------------------------------------------------------------------

// Running mean that returns the exact common value when all samples agree.
class MeanAccumulator {
 public:
  void add(double v);
  std::size_t count() const { return count_; }
  double mean() const;

 private:
  double sum_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
  std::size_t count_ = 0;
};

// Length-weighted mean of two boundary strengths. Equal strengths combine to
// exactly that strength.
double combine_strength(double s1, std::size_t n1, double s2, std::size_t n2);

}  // namespace cob
