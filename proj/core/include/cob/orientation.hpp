#pragma once

#include <span>
#include <vector>

#include "cob/types.hpp"

namespace cob {

struct OrientationRecord {
  int row = 0;
  int col = 0;
  int bin = 0;
  double confidence = 1.0;
  bool operator==(const OrientationRecord&) const = default;
};

// Per-pixel orientation estimates, one record per evaluated pixel.
struct OrientationField {
  int height = 0;
  int width = 0;
  int bins = 8;
  std::vector<OrientationRecord> records;
  bool operator==(const OrientationField&) const = default;
};

struct CurvePoint {
  int percentile = 0;  // 1..100
  double accuracy = 0.0;
};

// Mean per-class accuracy versus confidence percentile.
struct OrientationCurve {
  std::vector<CurvePoint> points;
  double auc = 0.0;  // trapezoid area over percentiles 1..100, normalized to [0,1]
};

// Ground-truth tangent bins for the boundary pixels of a partition.
// Boundaries are chained per region pair and simplified with Douglas-Peucker
// at tolerance epsilon. A boundary pixel is one whose east or south neighbor
// has another label; it takes the bin of its east edgel, else its south one.
OrientationField gt_orientations(const LabelMap& gt, double epsilon = 3.0, int bins = 8);

// Baseline estimator: orientation from the Gaussian-smoothed gradient of the
// contour map (scale sigma), averaged as a structure tensor over the same
// scale so that ridges and steps both resolve; the tangent is perpendicular
// to the dominant gradient direction. Confidence is the square root of the
// dominant tensor eigenvalue normalized to [0,1] over the image.
OrientationField local_gradient_orientation(const FloatMap& contour, double sigma = 2.0, int bins = 8);

// Mean over classes present in `truth` of the per-class hit rate.
double mean_class_accuracy(std::span<const int> predicted, std::span<const int> truth, int bins);

// For every confidence percentile p = 1..100 keeps the p% most confident gt
// pixels (by the prediction's confidence; ties at the cut are all kept) and
// computes the mean per-class accuracy. Predictions are looked up at the gt
// pixel, or at the nearest predicted pixel (city-block) when absent.
// Throws cob::Error on empty inputs and DimensionError on size mismatch.
OrientationCurve orient_accuracy(const OrientationField& pred, const OrientationField& gt);

}  // namespace cob
