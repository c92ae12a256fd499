#include "cob/timing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "cob/contours.hpp"
#include "cob/dense_reference.hpp"
#include "cob/fusion.hpp"
#include "cob/partition.hpp"
#include "cob/ucm.hpp"
#include "cob/watershed.hpp"

namespace cob {

namespace {

double hash_noise(int r, int c) {
  std::uint32_t x = static_cast<std::uint32_t>(r) * 73856093u ^ static_cast<std::uint32_t>(c) * 19349663u;
  x ^= x >> 16;
  x *= 0x7feb352du;
  x ^= x >> 15;
  x *= 0x846ca68bu;
  x ^= x >> 16;
  return static_cast<double>(x & 0xffffu) / 65535.0 - 0.5;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

template <typename Fn>
double time_ms(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

struct RunResult {
  double watershed = 0.0, owt = 0.0, ucm = 0.0, fusion = 0.0;
  std::vector<Hierarchy> hierarchies;  // per scale, then the fused one
};

RunResult run_sparse(const std::vector<ScaleResponse>& scales, const BenchConfig& cfg, double radius) {
  RunResult out;
  LabelMap labels;
  out.watershed = time_ms([&] { labels = watershed_oversegment(scales.front().strength); });
  std::vector<SparseBoundaries> reweighted;
  out.owt = time_ms([&] {
    const SparseBoundaries sb = sparse_from_labels(labels);
    const ArcGeometry geom = arc_orientations(sb, cfg.epsilon, scales.front().stack.bins());
    for (const ScaleResponse& s : scales) reweighted.push_back(owt_reweight(sb, geom, s.stack));
  });
  std::vector<ScaleMember> members;
  out.ucm = time_ms([&] {
    for (const SparseBoundaries& sb : reweighted) members.push_back({build_ucm(sb, labels), 1.0});
  });
  Hierarchy fused;
  out.fusion = time_ms([&] { fused = fuse(members, reweighted.front(), labels, radius); });
  for (auto& m : members) out.hierarchies.push_back(std::move(m.hierarchy));
  out.hierarchies.push_back(std::move(fused));
  return out;
}

RunResult run_dense(const std::vector<ScaleResponse>& scales, const BenchConfig& cfg, double radius) {
  RunResult out;
  LabelMap labels;
  out.watershed = time_ms([&] { labels = watershed_oversegment(scales.front().strength); });
  std::vector<BoundaryGrid> reweighted;
  out.owt = time_ms([&] {
    for (const ScaleResponse& s : scales) reweighted.push_back(dense_owt(labels, s.stack, cfg.epsilon));
  });
  std::vector<ScaleMember> members;
  out.ucm = time_ms([&] {
    for (const BoundaryGrid& g : reweighted) members.push_back({dense_build_ucm(labels, g), 1.0});
  });
  Hierarchy fused;
  out.fusion = time_ms([&] { fused = dense_fuse(members, labels, radius); });
  for (auto& m : members) out.hierarchies.push_back(std::move(m.hierarchy));
  out.hierarchies.push_back(std::move(fused));
  return out;
}

}  // namespace

FloatMap synthetic_image(int height, int width) {
  if (height <= 0 || width <= 0) throw std::invalid_argument("image size must be positive");
  FloatMap img(height, width);
  const double sy = height / 321.0;
  const double sx = width / 481.0;
  struct Disc {
    double r, c, radius, value;
  };
  const Disc discs[] = {{80, 120, 55, 0.85}, {200, 330, 80, 0.25}, {230, 110, 45, 0.65},
                        {90, 380, 35, 0.9},  {160, 240, 30, 0.45}, {270, 420, 28, 0.75}};
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double v = 0.35 + 0.2 * static_cast<double>(c) / std::max(1, width - 1);
      const double y = r / sy;
      const double x = c / sx;
      if (x > 20 && x < 460 && y > 150 && y < 172) v = 0.1;  // horizontal bar
      if (x > 300 && x < 318 && y > 10 && y < 300) v = 0.55;  // vertical bar
      for (const Disc& d : discs) {
        if (std::hypot(y - d.r, x - d.c) < d.radius) v = d.value;
      }
      v += 0.04 * std::sin(0.11 * x + 0.07 * y) + 0.03 * hash_noise(r, c);
      img(r, c) = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return img;
}

BenchReport bench_pipeline(const FloatMap& image, BenchMode mode, const BenchConfig& config) {
  if (config.runs < 1) throw std::invalid_argument("at least one run is required");
  const auto scales = multiscale_oriented_contours(image, config.sigmas);
  const double radius = default_projection_radius(image.height(), image.width());

  BenchReport report;
  report.height = image.height();
  report.width = image.width();
  std::optional<std::vector<Hierarchy>> reference;
  auto run_mode = [&](bool dense) {
    std::vector<double> ws, owt, ucm, fusion;
    for (int i = 0; i < config.runs; ++i) {
      RunResult r = dense ? run_dense(scales, config, radius) : run_sparse(scales, config, radius);
      ws.push_back(r.watershed);
      owt.push_back(r.owt);
      ucm.push_back(r.ucm);
      fusion.push_back(r.fusion);
      if (!reference) {
        reference = std::move(r.hierarchies);
        report.regions = reference->front().leaf_count();
      } else if (*reference != r.hierarchies) {
        report.identical = false;
      }
    }
    const std::string name = dense ? "dense" : "sparse";
    const double t_owt = median(owt);
    const double t_ucm = median(ucm);
    report.stages.push_back({"watershed", name, median(ws)});
    report.stages.push_back({"owt", name, t_owt});
    report.stages.push_back({"ucm", name, t_ucm});
    report.stages.push_back({"fusion", name, median(fusion)});
    (dense ? report.dense_owt_ucm_ms : report.sparse_owt_ucm_ms) = t_owt + t_ucm;
  };
  if (mode != BenchMode::kDense) run_mode(false);
  if (mode != BenchMode::kSparse) run_mode(true);
  if (mode == BenchMode::kBoth && report.sparse_owt_ucm_ms > 0.0) {
    report.ratio = report.dense_owt_ucm_ms / report.sparse_owt_ucm_ms;
  }
  return report;
}

}  // namespace cob
