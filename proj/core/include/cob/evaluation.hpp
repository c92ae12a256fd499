#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cob/types.hpp"
#include "cob/ucm.hpp"

namespace cob {

// Human annotations of one image; all share the image size.
struct GroundTruthSet {
  std::vector<LabelMap> annotations;

  int height() const;
  int width() const;
  // Throws std::invalid_argument when empty, DimensionError on mixed sizes.
  void validate() const;
};

// Precision = p_num / p_den, recall = r_num / r_den. Counts add across
// images and thresholds.
struct Counts {
  double p_num = 0.0;
  double p_den = 0.0;
  double r_num = 0.0;
  double r_den = 0.0;

  // Empty denominators count as perfect: no prediction is never imprecise and
  // nothing to find is never missed.
  double precision() const { return p_den > 0.0 ? p_num / p_den : 1.0; }
  double recall() const { return r_den > 0.0 ? r_num / r_den : 1.0; }
  double f_measure() const;

  Counts& operator+=(const Counts& o);
  bool operator==(const Counts&) const = default;
};

double f_measure(double precision, double recall);

// Zhang-Suen thinning to one-pixel-wide 8-connected curves.
BoolMap thin(const BoolMap& map);

// Maximum one-to-one matching between pixels of `pred` and `gt` lying at
// Euclidean distance <= radius. Returns the matched (pred, gt) index pairs
// into the raster-ordered pixel lists of each map.
struct PixelMatch {
  std::vector<std::size_t> pred_index;
  std::vector<std::size_t> gt_index;
};
PixelMatch match_pixels(const BoolMap& pred, const BoolMap& gt, double radius);

// Boundary measure of one image against thinned annotation maps. Predicted
// true positives are the size of one joint matching of the prediction
// against the pixels of all annotations, so a pixel counts when it is matched
// within some annotation; recall pools per-annotation matchings. Radius is
// max_dist times the image diagonal.
// p_num = TP, p_den = #pred, r_num = sum of matched gt, r_den = sum of gt.
Counts match_boundaries(const BoolMap& pred, std::span<const BoolMap> gt_maps, double max_dist);
// Same, thinning `pred` and the annotations' boundary maps first.
Counts match_boundaries(const BoolMap& pred, const GroundTruthSet& gts, double max_dist);

// Thinned boundary maps of every annotation.
std::vector<BoolMap> gt_boundary_maps(const GroundTruthSet& gts);

// Objects-and-parts region measure against every annotation of the set.
struct RegionMeasureParams {
  double object_overlap = 0.95;  // both-sided overlap for an object match
  double part_overlap = 0.25;    // smaller-side overlap for a part relation
  double part_weight = 0.1;      // credit given to parts
};
Counts region_counts(const LabelMap& partition, const GroundTruthSet& gts, const RegionMeasureParams& params = {});

struct RegionScore {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};
RegionScore region_measure(const LabelMap& partition, const GroundTruthSet& gts,
                           const RegionMeasureParams& params = {});

struct PRPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

struct PRCurve {
  std::vector<PRPoint> points;
  double ods_f = 0.0;
  double ods_threshold = 0.0;
  double ois_f = 0.0;
  double ap = 0.0;
};

// Default sweep: 0 plus every distinct positive level when there are at most
// max_count of them, otherwise max_count evenly spaced quantiles of the levels.
std::vector<double> threshold_grid(std::span<const double> levels, std::size_t max_count = 2000);

// Per-threshold counts of one image. Thresholds must be ascending and >= 0.
std::vector<Counts> boundary_counts(const BoundaryGrid& ucm, const GroundTruthSet& gts,
                                    std::span<const double> thresholds, double max_dist);
std::vector<Counts> region_counts_curve(const Hierarchy& h, const GroundTruthSet& gts,
                                        std::span<const double> thresholds, const RegionMeasureParams& params = {});

// Dataset curve from per-image counts: ODS takes the best F of the summed
// counts at one shared threshold; OIS lets every image pick its own
// threshold (starting from each image's best, refined for the summed F) and
// is never below ODS; AP averages interpolated precision at 101 recall
// samples.
PRCurve summarize(std::span<const double> thresholds, std::span<const std::vector<Counts>> per_image);

PRCurve pr_curve_boundary(const BoundaryGrid& ucm, const GroundTruthSet& gts, std::span<const double> thresholds,
                          double max_dist);
PRCurve pr_curve_region(const Hierarchy& h, const GroundTruthSet& gts, std::span<const double> thresholds,
                        const RegionMeasureParams& params = {});

}  // namespace cob
