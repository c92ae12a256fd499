#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "cob/types.hpp"

namespace cob {

// Unordered pair of neighboring regions, stored with a < b.
struct RegionPair {
  RegionId a = 0;
  RegionId b = 0;

  static RegionPair of(RegionId x, RegionId y) { return x < y ? RegionPair{x, y} : RegionPair{y, x}; }
  std::uint64_t key() const { return (static_cast<std::uint64_t>(a) << 32) | b; }
  static RegionPair from_key(std::uint64_t k) {
    return {static_cast<RegionId>(k >> 32), static_cast<RegionId>(k & 0xffffffffu)};
  }
  auto operator<=>(const RegionPair&) const = default;
};

struct BoundaryEntry {
  double strength = 0.0;
  std::vector<Edgel> coords;

  bool operator==(const BoundaryEntry&) const = default;
};

// Work done by a merge; used to check that merges stay local.
struct EraseStats {
  std::size_t entries_touched = 0;
  std::size_t edgels_moved = 0;
};

// Look-up table from neighboring-region pairs to (strength, edgel list).
//
// Invariants (checked by validate()): every pair is 4-adjacent in the
// underlying partition, coordinate lists are non-empty, pairwise disjoint and
// jointly cover exactly the edgels separating differently-labeled pixels.
//
// Single writer: erase() and merge_regions() mutate in place.
class SparseBoundaries {
 public:
  SparseBoundaries() = default;
  SparseBoundaries(int height, int width, RegionId region_count);

  int height() const { return height_; }
  int width() const { return width_; }
  RegionId region_count() const { return region_count_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t edgel_count() const;

  bool contains(RegionPair p) const { return entries_.contains(p.key()); }
  const BoundaryEntry* find(RegionPair p) const;
  // Throws LookupError for unknown pairs.
  const BoundaryEntry& at(RegionPair p) const;
  BoundaryEntry& at(RegionPair p);

  // Throws LookupError for out-of-range or equal ids, ConsistencyError when the
  // pair already exists or the coordinate list is empty.
  void insert(RegionPair p, BoundaryEntry entry);

  std::span<const RegionId> neighbors(RegionId id) const;

  // All pairs sorted by (a, b).
  std::vector<RegionPair> pairs() const;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (const auto& [k, e] : entries_) fn(RegionPair::from_key(k), e);
  }
  template <typename Fn>
  void for_each_mut(Fn&& fn) {
    for (auto& [k, e] : entries_) fn(RegionPair::from_key(k), e);
  }

  // Absorbs region p.b into p.a: entry (a,b) disappears, entries (b,x) are
  // concatenated onto (a,x) with length-weighted mean strengths. Region b is
  // left without neighbors; ids are not compacted and region_count() is
  // unchanged. Returns the surviving id (p.a).
  RegionId merge_regions(RegionPair p, EraseStats* stats = nullptr);

  // merge_regions() followed by compaction: the largest id is moved into the
  // vacated slot p.b, so ids stay 0..R-2. Only entries incident to a, b or the
  // relabeled id are touched.
  EraseStats erase(RegionPair p);

  // Copy with every coordinate list sorted, for order-insensitive comparison.
  SparseBoundaries normalized() const;

  bool operator==(const SparseBoundaries& other) const;

 private:
  void unlink(RegionId x, RegionId y);

  int height_ = 0;
  int width_ = 0;
  RegionId region_count_ = 0;
  std::unordered_map<std::uint64_t, BoundaryEntry> entries_;
  std::vector<std::vector<RegionId>> neighbors_;
};

// Entries for every 4-adjacent region pair, strength 0, coordinates in
// grid raster order. Throws RepresentationError for invalid label maps.
SparseBoundaries sparse_from_labels(const LabelMap& labels);

// Broadcasts entry strengths onto their edgels; junctions take the maximum
// of their incident edgels. Throws ConsistencyError when an edgel is listed
// twice or does not separate the pair it is listed under.
BoundaryGrid dense_from_sparse(const SparseBoundaries& sb, const LabelMap& labels);

struct Partition {
  LabelMap labels;
  SparseBoundaries boundaries;
};

// Regions are the 4-connected components of pixels not separated by an edgel
// with value > 0 (junctions ignored); entry strength is the mean edgel value.
Partition sparse_from_dense(const BoundaryGrid& grid);

// Functional form of SparseBoundaries::erase().
SparseBoundaries erase_boundary(SparseBoundaries sb, RegionPair pair);

// Partition obtained by removing every entry with strength <= threshold.
// Ids are canonical (raster first appearance).
LabelMap binarize(const SparseBoundaries& sb, double threshold);

// Recovers the pixel labeling whose ids match sb. Throws RepresentationError
// when sb does not describe a partition.
LabelMap labels_from_sparse(const SparseBoundaries& sb);

// Throws ConsistencyError when sb is not the boundary table of labels.
void validate(const SparseBoundaries& sb, const LabelMap& labels);

}  // namespace cob
