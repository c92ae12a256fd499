#pragma once

#include <string>
#include <vector>

#include "cob/types.hpp"

namespace cob {

// Deterministic grayscale test scene in [0,1]: overlapping discs, bars and a
// soft ramp plus low-amplitude hash noise. No random state involved.
FloatMap synthetic_image(int height, int width);

enum class BenchMode { kSparse, kDense, kBoth };

struct StageTiming {
  std::string stage;  // watershed, owt, ucm, fusion
  std::string mode;   // sparse, dense
  double ms = 0.0;    // median over runs
};

struct BenchConfig {
  std::vector<double> sigmas{2.0, 4.0};  // first scale drives the watershed
  int runs = 3;
  double epsilon = 3.0;
};

struct BenchReport {
  int height = 0;
  int width = 0;
  RegionId regions = 0;
  std::vector<StageTiming> stages;
  double sparse_owt_ucm_ms = 0.0;
  double dense_owt_ucm_ms = 0.0;
  double ratio = 0.0;           // dense / sparse for OWT + UCM; 0 unless both modes ran
  bool identical = true;        // both modes built the same hierarchies
};

// Runs watershed, OWT, UCM and multiscale fusion on `image` (contours are
// computed once, untimed). Each stage time is the median of config.runs runs.
BenchReport bench_pipeline(const FloatMap& image, BenchMode mode, const BenchConfig& config = {});

}  // namespace cob
