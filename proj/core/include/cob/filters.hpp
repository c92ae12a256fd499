#pragma once

#include <vector>

#include "cob/types.hpp"

namespace cob {

// Sampled Gaussian (order 0) or its first/second derivative, truncated at
// 4 sigma. Order-0 taps sum to 1.
std::vector<double> gaussian_kernel(double sigma, int order);

// Separable correlation of one channel with row kernel `kx` (along columns)
// and column kernel `ky` (along rows); borders replicate the edge pixel.
std::vector<double> separable_filter(const std::vector<double>& image, int height, int width,
                                     const std::vector<double>& kx, const std::vector<double>& ky);

// Gaussian derivatives of a single-channel image at scale sigma, in array
// coordinates (x = column, y = row pointing down).
struct GaussianDerivatives {
  std::vector<double> x, y, xx, xy, yy;
};

GaussianDerivatives gaussian_derivatives(const FloatMap& image, int channel, double sigma);

}  // namespace cob
