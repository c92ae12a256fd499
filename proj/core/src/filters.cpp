#include "cob/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cob {

std::vector<double> gaussian_kernel(double sigma, int order) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (order < 0 || order > 2) throw std::invalid_argument("kernel order must be 0, 1 or 2");
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  std::vector<double> g(2 * radius + 1);
  for (int j = -radius; j <= radius; ++j) g[j + radius] = std::exp(-0.5 * j * j / (sigma * sigma));
  const double total = std::accumulate(g.begin(), g.end(), 0.0);
  for (double& v : g) v /= total;
  if (order == 0) return g;

  // Correlation taps: sum_j k[j] f(i + j) approximates the derivative at i.
  std::vector<double> k(g.size());
  const double s2 = sigma * sigma;
  for (int j = -radius; j <= radius; ++j) {
    const double x = j;
    k[j + radius] = order == 1 ? x / s2 * g[j + radius] : (x * x / (s2 * s2) - 1.0 / s2) * g[j + radius];
  }
  if (order == 2) {
    // Remove the discretization DC term so flat regions respond with ~0.
    const double mean = std::accumulate(k.begin(), k.end(), 0.0) / static_cast<double>(k.size());
    for (double& v : k) v -= mean;
  }
  return k;
}

std::vector<double> separable_filter(const std::vector<double>& image, int height, int width,
                                     const std::vector<double>& kx, const std::vector<double>& ky) {
  const int rx = static_cast<int>(kx.size() / 2);
  const int ry = static_cast<int>(ky.size() / 2);
  std::vector<double> tmp(image.size()), out(image.size());
  for (int r = 0; r < height; ++r) {
    const double* row = image.data() + static_cast<std::size_t>(r) * width;
    for (int c = 0; c < width; ++c) {
      double s = 0.0;
      for (int j = -rx; j <= rx; ++j) s += kx[j + rx] * row[std::clamp(c + j, 0, width - 1)];
      tmp[static_cast<std::size_t>(r) * width + c] = s;
    }
  }
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double s = 0.0;
      for (int j = -ry; j <= ry; ++j) s += ky[j + ry] * tmp[static_cast<std::size_t>(std::clamp(r + j, 0, height - 1)) * width + c];
      out[static_cast<std::size_t>(r) * width + c] = s;
    }
  }
  return out;
}

GaussianDerivatives gaussian_derivatives(const FloatMap& image, int channel, double sigma) {
  const auto plane = image.channel(channel);
  const std::vector<double> src(plane.begin(), plane.end());
  const auto g0 = gaussian_kernel(sigma, 0);
  const auto g1 = gaussian_kernel(sigma, 1);
  const auto g2 = gaussian_kernel(sigma, 2);
  const int h = image.height();
  const int w = image.width();
  return {separable_filter(src, h, w, g1, g0), separable_filter(src, h, w, g0, g1),
          separable_filter(src, h, w, g2, g0), separable_filter(src, h, w, g1, g1),
          separable_filter(src, h, w, g0, g2)};
}

}  // namespace cob
