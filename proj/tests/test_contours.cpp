#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "cob/contours.hpp"
#include "cob/filters.hpp"

namespace cob {
namespace {

constexpr double kPi = std::numbers::pi;

FloatMap step_edge(int size, double theta) {
  FloatMap m(size, size);
  const double cx = (size - 1) / 2.0;
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      const double d = -std::sin(theta) * (c - cx) + std::cos(theta) * (cx - r);
      m(r, c) = d > 1e-9 ? 0.8f : 0.2f;
    }
  }
  return m;
}

int argmax_channel(const OrientedStack& s, int r, int c) {
  int best = 0;
  for (int k = 1; k < s.bins(); ++k) {
    if (s.responses()(r, c, k) > s.responses()(r, c, best)) best = k;
  }
  return best;
}

TEST(GaussianKernel, Moments) {
  const auto g = gaussian_kernel(2.0, 0);
  EXPECT_EQ(g.size(), 17u);
  EXPECT_NEAR(std::accumulate(g.begin(), g.end(), 0.0), 1.0, 1e-12);
  const auto d1 = gaussian_kernel(2.0, 1);
  double first = 0.0;
  for (int j = -8; j <= 8; ++j) first += d1[j + 8] * j;
  EXPECT_NEAR(first, 1.0, 1e-3);
  const auto d2 = gaussian_kernel(2.0, 2);
  EXPECT_NEAR(std::accumulate(d2.begin(), d2.end(), 0.0), 0.0, 1e-12);
  EXPECT_THROW(gaussian_kernel(0.0, 0), std::invalid_argument);
}

TEST(Contours, ConstantImageRespondsWithZeros) {
  const std::vector<double> sigmas{1.0, 2.0};
  for (const ScaleResponse& s : multiscale_oriented_contours(FloatMap(16, 16, 1, 0.6f), sigmas)) {
    for (float v : s.stack.responses().data()) EXPECT_EQ(v, 0.0f);
    for (float v : s.strength.data()) EXPECT_EQ(v, 0.0f);
  }
}

TEST(Contours, VerticalStepPeaksInVerticalChannelOnTheEdge) {
  FloatMap img(32, 32, 1, 0.2f);
  for (int r = 0; r < 32; ++r) {
    for (int c = 16; c < 32; ++c) img(r, c) = 0.9f;
  }
  const std::vector<double> sigmas{1.0, 2.0, 4.0};
  for (const ScaleResponse& s : multiscale_oriented_contours(img, sigmas)) {
    for (int r = 10; r < 22; ++r) {
      EXPECT_EQ(argmax_channel(s.stack, r, 15), 4);
      // Strength across the row peaks at the step.
      int best = 0;
      for (int c = 1; c < 31; ++c) {
        if (s.strength(r, c) > s.strength(r, best)) best = c;
      }
      EXPECT_TRUE(best == 15 || best == 16) << "sigma " << s.sigma << " peak at " << best;
    }
  }
}

TEST(Contours, StrengthIsChannelMaxAndResponsesInRange) {
  const std::vector<double> sigmas{1.5};
  const auto out = multiscale_oriented_contours(step_edge(24, 0.3), sigmas);
  const auto& s = out.front();
  for (int r = 0; r < 24; ++r) {
    for (int c = 0; c < 24; ++c) {
      float m = 0.0f;
      for (int k = 0; k < 8; ++k) {
        const float v = s.stack.responses()(r, c, k);
        EXPECT_GE(v, 0.0f);
        EXPECT_LE(v, 1.0f);
        m = std::max(m, v);
      }
      EXPECT_EQ(s.strength(r, c), m);
    }
  }
}

TEST(Contours, RotationShiftsTheArgmaxChannel) {
  const std::vector<double> sigmas{2.0};
  for (int k = 0; k < 8; ++k) {
    const auto out = multiscale_oriented_contours(step_edge(41, k * kPi / 8), sigmas);
    int hits = 0, total = 0;
    for (int r = 14; r <= 26; ++r) {
      for (int c = 14; c <= 26; ++c) {
        const double d = -std::sin(k * kPi / 8) * (c - 20) + std::cos(k * kPi / 8) * (20 - r);
        if (std::abs(d) > 0.75) continue;
        ++total;
        hits += argmax_channel(out.front().stack, r, c) == k;
      }
    }
    ASSERT_GT(total, 5);
    EXPECT_GE(static_cast<double>(hits) / total, 0.9) << "bin " << k;
  }
}

TEST(Contours, ArgumentChecks) {
  const FloatMap img(8, 8);
  EXPECT_THROW(multiscale_oriented_contours(img, std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(multiscale_oriented_contours(img, std::vector<double>{2.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(multiscale_oriented_contours(FloatMap(8, 8, 1, 2.0f), std::vector<double>{1.0}), RepresentationError);
}

}  // namespace
}  // namespace cob
