// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cob/evaluation.hpp"
#include "cob/fusion.hpp"
#include "cob/orientation.hpp"
#include "cob/partition.hpp"
#include "cob/timing.hpp"
#include "cob/ucm.hpp"
#include "cob/watershed.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#ifdef COB_CLI_PATH
#include "cli_runner.hpp"
#endif

namespace {

using namespace cob;
using testing::Rng;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome round_trip() {
  Rng rng(1001);
  const auto t0 = Clock::now();
  int failures = 0;
  for (int i = 0; i < 500; ++i) {
    const LabelMap labels = testing::random_sized_labels(rng, 8, 64, 80);
    const SparseBoundaries sb = testing::with_random_strengths(sparse_from_labels(labels), rng);
    const Partition back = sparse_from_dense(dense_from_sparse(sb, labels));
    if (!same_partition(back.labels, labels) || back.labels != labels ||
        back.boundaries.normalized() != sb.normalized()) {
      ++failures;
    }
  }
  const double s = seconds_since(t0);
  return {failures == 0 && s < 10.0, fmt("500 maps, %d mismatches, %.2f s (limit 10 s)", failures, s)};
}

Outcome merge_oracle() {
  Rng rng(1002);
  int failures = 0;
  for (int i = 0; i < 500; ++i) {
    const LabelMap labels = testing::random_sized_labels(rng, 2, 24, 40);
    if (labels.region_count() < 2) {
      --i;
      continue;
    }
    const SparseBoundaries sb = testing::with_random_strengths(sparse_from_labels(labels), rng);
    const auto pairs = sb.pairs();
    const RegionPair p = pairs[std::uniform_int_distribution<std::size_t>(0, pairs.size() - 1)(rng)];
    if (erase_boundary(sb, p).normalized() != testing::erase_oracle(labels, sb, p).normalized()) ++failures;
  }
  return {failures == 0, fmt("500 random erasures, %d mismatches", failures)};
}

Outcome ultrametric_coarsening() {
  Rng rng(1003);
  int violations = 0;
  std::size_t checks = 0;
  for (int i = 0; i < 100; ++i) {
    const Hierarchy h = testing::random_hierarchy(rng, 16 + i % 17, 16 + i % 13, 2 + i % 40);
    std::vector<double> levels = level_count(h).levels;
    levels.insert(levels.begin(), -1.0);
    LabelMap previous = partition_at(h, levels.front());
    for (std::size_t k = 1; k < levels.size(); ++k) {
      const LabelMap next = partition_at(h, levels[k]);
      ++checks;
      if (!is_coarsening(previous, next)) ++violations;
      previous = next;
    }
  }
  return {violations == 0, fmt("100 hierarchies, %zu adjacent level pairs, %d violations", checks, violations)};
}

Outcome ucm_oracle() {
  Rng rng(1004);
  int failures = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const LabelMap labels = testing::random_labels(rng, 8, 8, 2 + i % 30);
    // Every tenth case has all strengths equal, so every merge is an exact tie.
    const SparseBoundaries sb = i % 10 == 0 ? testing::with_quantized_strengths(sparse_from_labels(labels), rng, 1)
                                            : testing::with_random_strengths(sparse_from_labels(labels), rng);
    const Hierarchy h = build_ucm(sb, labels);
    const auto oracle = testing::agglomerate_oracle(labels, sb);
    bool ok = h.merges.size() == oracle.size();
    for (std::size_t k = 0; ok && k < oracle.size(); ++k) {
      const double diff = std::abs(h.merges[k].level - oracle[k].level);
      worst = std::max(worst, diff);
      ok = h.merges[k].a == oracle[k].a && h.merges[k].b == oracle[k].b && h.merges[k].parent == oracle[k].parent &&
           diff <= 1e-9;
    }
    failures += !ok;
  }
  return {failures == 0, fmt("100 random 8x8 cases, %d mismatches, max level difference %.3g", failures, worst)};
}

// Soft step edge through the center with tangent angle theta.
FloatMap step_edge(int size, double theta) {
  FloatMap m(size, size);
  const double cx = (size - 1) / 2.0;
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      const double d = -std::sin(theta) * (c - cx) + std::cos(theta) * (cx - r);
      m(r, c) = static_cast<float>(0.5 + 0.5 * std::tanh(d));
    }
  }
  return m;
}

Outcome orientation_baselines() {
  Rng rng(1005);
  const OrientationField gt = gt_orientations(testing::random_labels(rng, 600, 600, 6000));
  OrientationField pred{gt.height, gt.width, 8, {}};
  std::uniform_int_distribution<int> bin(0, 7);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  for (int r = 0; r < gt.height; ++r) {
    for (int c = 0; c < gt.width; ++c) pred.records.push_back({r, c, bin(rng), conf(rng)});
  }
  const double auc = orient_accuracy(pred, gt).auc;

  constexpr double kPi = std::numbers::pi;
  std::vector<int> predicted, truth;
  for (int k = 0; k < 8; ++k) {
    const double theta = k * kPi / 8;
    for (const auto& rec : local_gradient_orientation(step_edge(41, theta)).records) {
      const double x = rec.col - 20.0;
      const double y = 20.0 - rec.row;
      if (std::abs(-std::sin(theta) * x + std::cos(theta) * y) > 1.0 || std::hypot(x, y) > 12) continue;
      predicted.push_back(rec.bin);
      truth.push_back(k);
    }
  }
  const double acc = mean_class_accuracy(predicted, truth, 8);
  const bool pass = gt.records.size() >= 100000 && std::abs(auc - 0.125) <= 0.01 && acc >= 0.9;
  return {pass, fmt("random AUC %.4f over %zu gt pixels (0.125 +- 0.01); local gradient %.3f on rotated edges (>= 0.9)",
                    auc, gt.records.size(), acc)};
}

Outcome boundary_measure() {
  Rng rng(1006);
  int perfect_failures = 0;
  for (int i = 0; i < 20; ++i) {
    const GroundTruthSet gts{{testing::random_labels(rng, 40, 50, 2 + i)}};
    const Counts c = match_boundaries(boundary_pixels(gts.annotations.front()), gts, 0.0075);
    if (c.precision() != 1.0 || c.recall() != 1.0 || c.f_measure() != 1.0) ++perfect_failures;
  }

  int disagreements = 0;
  std::bernoulli_distribution on(0.12);
  std::uniform_int_distribution<int> line(0, 11), shift(-2, 2);
  for (int i = 0; i < 400; ++i) {
    BoolMap pred(12, 14), gt(12, 14);
    if (i % 2 == 0) {
      for (auto& v : pred.data) v = on(rng);
      for (auto& v : gt.data) v = on(rng);
    } else {
      // Shifted copies of a few horizontal and vertical lines.
      for (int l = 0; l < 3; ++l) {
        const int pos = line(rng);
        const int ds = shift(rng);
        const bool horizontal = l % 2 == 0;
        for (int t = 0; t < (horizontal ? 14 : 12); ++t) {
          if (horizontal) {
            gt(pos, t) = 1;
            pred(std::clamp(pos + ds, 0, 11), t) = 1;
          } else {
            gt(t, pos) = 1;
            pred(t, std::clamp(pos + ds, 0, 13)) = 1;
          }
        }
      }
    }
    const double radius = 0.5 + (i % 5);
    if (match_pixels(pred, gt, radius).pred_index.size() != testing::kuhn_matching(pred, gt, radius)) ++disagreements;
  }

  int monotone_violations = 0;
  std::bernoulli_distribution sparse(0.1);
  for (int i = 0; i < 20; ++i) {
    BoolMap pred(30, 30);
    for (auto& v : pred.data) v = sparse(rng);
    const GroundTruthSet gts{{testing::random_labels(rng, 30, 30, 8), testing::random_labels(rng, 30, 30, 5)}};
    const auto maps = gt_boundary_maps(gts);
    double previous = -1.0;
    for (double d = 0.005; d < 0.2; d += 0.01) {
      const Counts c = match_boundaries(pred, maps, d);
      if (c.p_num < previous) ++monotone_violations;
      previous = c.p_num;
    }
  }
  const bool pass = perfect_failures == 0 && disagreements == 0 && monotone_violations == 0;
  return {pass, fmt("pred==gt imperfect in %d/20; matcher disagreements %d/400; monotonicity violations %d",
                    perfect_failures, disagreements, monotone_violations)};
}

Outcome efficiency() {
  const auto t0 = Clock::now();
  const BenchReport r = bench_pipeline(synthetic_image(321, 481), BenchMode::kBoth);
  const double s = seconds_since(t0);
  const bool pass = r.ratio >= 3.0 && r.identical && s < 120.0;
  return {pass, fmt("321x481, %u regions: sparse %.1f ms, dense %.1f ms, ratio %.2fx (>= 3), %s, %.1f s (limit 120 s)",
                    r.regions, r.sparse_owt_ucm_ms, r.dense_owt_ucm_ms, r.ratio,
                    r.identical ? "identical hierarchies" : "HIERARCHIES DIFFER", s)};
}

Outcome owt_topology() {
  Rng rng(1008);
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    const int h = 6 + i % 20;
    const int w = 6 + i % 23;
    const LabelMap labels = testing::random_labels(rng, h, w, 2 + i % 40);
    const SparseBoundaries sb = testing::with_random_strengths(sparse_from_labels(labels), rng);
    const OrientedStack stack(testing::random_map(rng, h, w, 8));
    const SparseBoundaries out = owt_reweight(sb, arc_orientations(sb, 3.0, 8), stack);
    bool ok = out.pairs() == sb.pairs();
    for (const RegionPair& p : sb.pairs()) ok = ok && out.at(p).coords == sb.at(p).coords;
    violations += !ok;
  }
  return {violations == 0, fmt("100 random cases, %d topology changes", violations)};
}

Outcome fusion_convexity() {
  Rng rng(1009);
  int violations = 0;
  std::size_t entries = 0;
  for (int i = 0; i < 100; ++i) {
    const int h = 10 + i % 11;
    const int w = 10 + i % 7;
    const LabelMap fine = testing::random_labels(rng, h, w, 20 + i % 30);
    const SparseBoundaries fine_sb = sparse_from_labels(fine);
    const std::vector<ScaleMember> scales{
        {testing::random_hierarchy(rng, h, w, 3 + i % 10), std::uniform_real_distribution<>(0.1, 2)(rng)},
        {testing::random_hierarchy(rng, h, w, 2 + i % 5), std::uniform_real_distribution<>(0.1, 2)(rng)}};
    const double radius = 0.5 + (i % 4);
    const SparseBoundaries fused = fused_boundaries(scales, fine_sb, radius);
    const SparseBoundaries p0 = project(scales[0].hierarchy, fine_sb, radius);
    const SparseBoundaries p1 = project(scales[1].hierarchy, fine_sb, radius);
    for (const RegionPair& p : fine_sb.pairs()) {
      const double a = p0.at(p).strength;
      const double b = p1.at(p).strength;
      const double f = fused.at(p).strength;
      ++entries;
      if (f < std::min(a, b) || f > std::max(a, b)) ++violations;
    }
  }
  return {violations == 0, fmt("100 two-scale cases, %zu entries, %d violations", entries, violations)};
}

Outcome cli_determinism() {
#ifdef COB_CLI_PATH
  const std::filesystem::path root =
      std::filesystem::temp_directory_path() / ("cob_acceptance_" + std::to_string(::getpid()));
  std::filesystem::remove_all(root);
  const std::string e1 = testing::run_pipeline(COB_CLI_PATH, root / "first");
  const std::string e2 = e1.empty() ? testing::run_pipeline(COB_CLI_PATH, root / "second") : std::string();
  if (!e1.empty() || !e2.empty()) {
    std::filesystem::remove_all(root);
    return {false, "pipeline failed: " + e1 + e2};
  }
  const auto a = testing::snapshot(root / "first");
  const auto b = testing::snapshot(root / "second");
  std::filesystem::remove_all(root);
  return {a == b && !a.empty(), fmt("%zu output files per run, %s", a.size(), a == b ? "byte-identical" : "DIFFER")};
#else
  return {false, "cob CLI was not built"};
#endif
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"sparse-dense round trip", round_trip},
      {"merge oracle", merge_oracle},
      {"ultrametric coarsening", ultrametric_coarsening},
      {"UCM oracle", ucm_oracle},
      {"orientation baselines", orientation_baselines},
      {"boundary measure correctness", boundary_measure},
      {"efficiency (sparse vs dense)", efficiency},
      {"OWT topology preservation", owt_topology},
      {"fusion convexity", fusion_convexity},
      {"end-to-end determinism", cli_determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
