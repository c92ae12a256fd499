#pragma once

#include <span>
#include <vector>

#include "cob/types.hpp"
#include "cob/watershed.hpp"

namespace cob {

struct ScaleResponse {
  double sigma = 0.0;
  FloatMap strength;     // per-pixel max over orientations
  OrientedStack stack;   // K channels, channel k tuned to tangent angle k*pi/K
};

// Filter-bank contour detector. At each scale the oriented response is the
// energy of steered first and second Gaussian derivatives taken across the
// tangent direction, so it peaks on step edges as well as thin lines. Each
// scale is normalized by its own maximum; flat images respond with zeros.
// Throws std::invalid_argument on empty or non-ascending sigmas and
// RepresentationError on values outside [0,1].
std::vector<ScaleResponse> multiscale_oriented_contours(const FloatMap& image, std::span<const double> sigmas,
                                                        int bins = 8);

}  // namespace cob
