#include "cob/contours.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cob/filters.hpp"

namespace cob {

namespace {

// Absolute responses below this are numerical residue of flat input.
constexpr double kFlatFloor = 1e-9;

}  // namespace

std::vector<ScaleResponse> multiscale_oriented_contours(const FloatMap& image, std::span<const double> sigmas,
                                                        int bins) {
  if (sigmas.empty()) throw std::invalid_argument("at least one scale is required");
  if (!std::is_sorted(sigmas.begin(), sigmas.end())) throw std::invalid_argument("scales must be ascending");
  if (bins < 2) throw std::invalid_argument("orientation bins must be >= 2");
  if (image.channels() != 1) throw DimensionError("contour detection expects a grayscale image");
  for (float v : image.data()) {
    if (!(v >= 0.0f && v <= 1.0f)) throw RepresentationError("image values must lie in [0,1]");
  }
  const int h = image.height();
  const int w = image.width();
  const std::size_t n = image.plane_size();

  std::vector<ScaleResponse> out;
  for (double sigma : sigmas) {
    const GaussianDerivatives d = gaussian_derivatives(image, 0, sigma);
    std::vector<double> energy(n * bins);
    double peak = 0.0;
    for (int k = 0; k < bins; ++k) {
      // Normal to tangent angle theta, converted from y-up to row-down axes.
      const double theta = k * std::numbers::pi / bins;
      const double nx = -std::sin(theta);
      const double ny = -std::cos(theta);
      for (std::size_t i = 0; i < n; ++i) {
        const double first = sigma * (nx * d.x[i] + ny * d.y[i]);
        const double second = sigma * sigma * (nx * nx * d.xx[i] + 2.0 * nx * ny * d.xy[i] + ny * ny * d.yy[i]);
        const double e = std::sqrt(first * first + second * second);
        energy[k * n + i] = e;
        peak = std::max(peak, e);
      }
    }
    FloatMap stack(h, w, bins);
    FloatMap strength(h, w);
    if (peak > kFlatFloor) {
      for (int k = 0; k < bins; ++k) {
        auto ch = stack.channel(k);
        for (std::size_t i = 0; i < n; ++i) ch[i] = static_cast<float>(std::clamp(energy[k * n + i] / peak, 0.0, 1.0));
      }
      auto s = strength.channel(0);
      for (std::size_t i = 0; i < n; ++i) {
        float m = 0.0f;
        for (int k = 0; k < bins; ++k) m = std::max(m, stack.channel(k)[i]);
        s[i] = m;
      }
    }
    out.push_back(ScaleResponse{sigma, std::move(strength), OrientedStack(std::move(stack))});
  }
  return out;
}

}  // namespace cob
