#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "cob/contours.hpp"
#include "cob/evaluation.hpp"
#include "cob/fusion.hpp"
#include "cob/io.hpp"
#include "cob/orientation.hpp"
#include "cob/partition.hpp"
#include "cob/timing.hpp"
#include "cob/ucm.hpp"
#include "cob/watershed.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using cob::ScaleMember;

namespace {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first failure by
// index is rethrown once every worker has stopped.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

fs::path summary_path(const fs::path& out) {
  fs::path p = out;
  p.replace_extension(".summary.json");
  return p;
}

std::vector<double> parse_sigmas(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size() || !(v > 0.0)) throw std::invalid_argument("bad sigma '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("no sigmas given");
  return out;
}

std::pair<int, int> parse_size(const std::string& text) {
  const std::size_t x = text.find('x');
  if (x == std::string::npos) throw std::invalid_argument("size must look like HxW");
  const int h = std::stoi(text.substr(0, x));
  const int w = std::stoi(text.substr(x + 1));
  if (h < 2 || w < 2) throw std::invalid_argument("size must be at least 2x2");
  return {h, w};
}

ScaleMember parse_scale(const std::string& text) {
  const std::size_t colon = text.rfind(':');
  if (colon == std::string::npos) throw std::invalid_argument("scale must look like path:weight");
  std::size_t used = 0;
  const std::string weight = text.substr(colon + 1);
  const double w = std::stod(weight, &used);
  if (used != weight.size()) throw std::invalid_argument("bad weight '" + weight + "'");
  return {cob::io::read_ucm_json(text.substr(0, colon)), w};
}

// All distinct positive levels across the predictions, thinned to the grid.
std::vector<double> shared_thresholds(const std::vector<cob::Hierarchy>& preds, std::size_t max_count) {
  std::vector<double> levels;
  for (const auto& h : preds) {
    const auto s = cob::level_count(h);
    levels.insert(levels.end(), s.levels.begin(), s.levels.end());
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return cob::threshold_grid(levels, max_count);
}

struct Dataset {
  std::vector<cob::io::ManifestEntry> entries;
  std::vector<cob::Hierarchy> predictions;
  std::vector<cob::GroundTruthSet> ground_truth;
};

Dataset load_dataset(const fs::path& manifest, int jobs) {
  Dataset d;
  d.entries = cob::io::read_manifest(manifest);
  d.predictions.resize(d.entries.size());
  d.ground_truth.resize(d.entries.size());
  parallel_for(d.entries.size(), jobs, [&](std::size_t i) {
    d.predictions[i] = cob::io::read_ucm_json(d.entries[i].prediction);
    d.ground_truth[i] = cob::io::read_ground_truth(d.entries[i].ground_truth);
    if (d.ground_truth[i].height() != d.predictions[i].finest.height() ||
        d.ground_truth[i].width() != d.predictions[i].finest.width()) {
      throw cob::DimensionError(d.entries[i].id + ": prediction and ground truth differ in size");
    }
  });
  return d;
}

void write_curve(const fs::path& out, const cob::PRCurve& curve) {
  cob::io::write_atomic(out, cob::io::curve_to_tsv(curve));
  cob::io::write_atomic(summary_path(out), cob::io::curve_summary_json(curve));
}

void run_detect(const fs::path& image, const std::string& sigmas, int bins, const fs::path& dir) {
  const auto scales = cob::multiscale_oriented_contours(cob::io::read_pgm(image), parse_sigmas(sigmas), bins);
  fs::create_directories(dir);
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const std::string stem = "scale" + std::to_string(i);
    cob::io::write_fmap(dir / (stem + ".strength.fmap"), scales[i].strength);
    cob::io::write_fmap(dir / (stem + ".stack.fmap"), scales[i].stack.responses());
  }
}

void run_owt(const fs::path& strength, const fs::path& stack_path, double epsilon, const std::string& convention,
             const fs::path& out) {
  const cob::FloatMap s = cob::io::read_fmap(strength);
  if (s.channels() != 1) throw cob::DimensionError("strength map must have one channel");
  const cob::OrientedStack stack(cob::io::read_fmap(stack_path));
  const cob::SparseBoundaries sb = cob::sparse_from_labels(cob::watershed_oversegment(s));
  const auto conv = convention == "normal" ? cob::OrientationConvention::kNormal : cob::OrientationConvention::kTangent;
  cob::io::write_sb_json(out, cob::owt_reweight(sb, cob::arc_orientations(sb, epsilon, stack.bins()), stack, conv));
}

void run_ucm(const fs::path& in, const fs::path& out, const fs::path& grid) {
  const cob::Hierarchy h = cob::build_ucm(cob::io::read_sb_json(in));
  cob::io::write_ucm_json(out, h);
  if (!grid.empty()) cob::io::write_fmap(grid, cob::ucm_grid(h).to_float_map());
}

void run_fuse(const std::vector<std::string>& scale_args, const fs::path& fine, double radius, const fs::path& out) {
  std::vector<ScaleMember> scales;
  for (const auto& s : scale_args) scales.push_back(parse_scale(s));
  const cob::SparseBoundaries fine_sb = cob::io::read_sb_json(fine);
  if (radius < 0.0) radius = cob::default_projection_radius(fine_sb.height(), fine_sb.width());
  cob::io::write_ucm_json(out, cob::fuse(scales, fine_sb, radius));
}

void run_threshold(const fs::path& in, double t, const fs::path& out) {
  cob::io::write_lmap(out, cob::partition_at(cob::io::read_ucm_json(in), t));
}

void run_eval_boundary(const fs::path& manifest, double max_dist, std::size_t max_thresholds, int jobs,
                       const fs::path& out) {
  const Dataset d = load_dataset(manifest, jobs);
  const auto thresholds = shared_thresholds(d.predictions, max_thresholds);
  std::vector<std::vector<cob::Counts>> per_image(d.entries.size());
  parallel_for(d.entries.size(), jobs, [&](std::size_t i) {
    per_image[i] = cob::boundary_counts(cob::ucm_grid(d.predictions[i]), d.ground_truth[i], thresholds, max_dist);
  });
  write_curve(out, cob::summarize(thresholds, per_image));
}

void run_eval_region(const fs::path& manifest, std::size_t max_thresholds, int jobs, const fs::path& out) {
  const Dataset d = load_dataset(manifest, jobs);
  const auto thresholds = shared_thresholds(d.predictions, max_thresholds);
  std::vector<std::vector<cob::Counts>> per_image(d.entries.size());
  parallel_for(d.entries.size(), jobs, [&](std::size_t i) {
    per_image[i] = cob::region_counts_curve(d.predictions[i], d.ground_truth[i], thresholds);
  });
  write_curve(out, cob::summarize(thresholds, per_image));
}

void run_eval_orient(const fs::path& pred, const fs::path& gt, const fs::path& out) {
  const cob::OrientationCurve curve =
      cob::orient_accuracy(cob::io::read_orient_json(pred), cob::io::read_orient_json(gt));
  cob::io::write_atomic(out, cob::io::orientation_curve_tsv(curve));
  cob::io::write_atomic(summary_path(out), json{{"auc", curve.auc}}.dump(2) + "\n");
}

void run_orient_gt(const fs::path& gt, double epsilon, int bins, const fs::path& out) {
  cob::io::write_orient_json(out, cob::gt_orientations(cob::io::read_lmap(gt), epsilon, bins));
}

void run_orient_grad(const fs::path& contour, double sigma, int bins, const fs::path& out) {
  cob::io::write_orient_json(out, cob::local_gradient_orientation(cob::io::read_fmap(contour), sigma, bins));
}

void run_bench(const std::string& size, const std::string& mode, int runs, const fs::path& out) {
  const auto [h, w] = parse_size(size);
  cob::BenchConfig config;
  config.runs = runs;
  const cob::BenchMode m = mode == "sparse" ? cob::BenchMode::kSparse
                           : mode == "dense" ? cob::BenchMode::kDense
                                             : cob::BenchMode::kBoth;
  const cob::BenchReport r = cob::bench_pipeline(cob::synthetic_image(h, w), m, config);
  std::ostringstream tsv;
  tsv << "stage\tmode\tms\n" << std::fixed << std::setprecision(3);
  for (const auto& s : r.stages) tsv << s.stage << '\t' << s.mode << '\t' << s.ms << '\n';
  cob::io::write_atomic(out, tsv.str());
  const json summary{{"height", r.height},
                     {"width", r.width},
                     {"regions", r.regions},
                     {"runs", runs},
                     {"sparse_owt_ucm_ms", r.sparse_owt_ucm_ms},
                     {"dense_owt_ucm_ms", r.dense_owt_ucm_ms},
                     {"ratio", r.ratio},
                     {"identical", r.identical}};
  cob::io::write_atomic(summary_path(out), summary.dump(2) + "\n");
  std::cout << tsv.str();
  if (m == cob::BenchMode::kBoth) {
    std::cout << "dense/sparse OWT+UCM ratio " << std::setprecision(2) << r.ratio
              << (r.identical ? " (identical hierarchies)" : " (HIERARCHIES DIFFER)") << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical segmentation toolkit: contours, oriented watershed, UCM, fusion and benchmarks"};
  app.require_subcommand(1);

  int jobs = 1;
  auto add_jobs = [&](CLI::App* cmd) {
    cmd->add_option("--jobs", jobs, "Images processed concurrently")->envname("COB_JOBS")->check(CLI::PositiveNumber);
  };

  fs::path in, in2, out, grid, fine, manifest, pred, gt;
  std::string sigmas = "1,2,4";
  std::string convention = "tangent";
  std::string size = "321x481";
  std::string mode = "both";
  std::vector<std::string> scale_args;
  double epsilon = 3.0, t = 0.5, max_dist = 0.0075, radius = -1.0, sigma = 2.0;
  int bins = 8, runs = 3;
  std::size_t max_thresholds = 2000;

  auto* detect = app.add_subcommand("detect", "Multiscale oriented contours of a PGM image");
  detect->add_option("image", in, "Input image (binary PGM)")->required()->check(CLI::ExistingFile);
  detect->add_option("--sigmas", sigmas, "Ascending comma-separated scales")->capture_default_str();
  detect->add_option("--bins", bins, "Orientation channels")->capture_default_str()->check(CLI::Range(2, 64));
  detect->add_option("-o,--out", out, "Output directory for scaleN.strength.fmap / scaleN.stack.fmap")->required();

  auto* owt = app.add_subcommand("owt", "Watershed over-segmentation reweighted by oriented contours");
  owt->add_option("strength", in, "Strength map (.fmap, one channel)")->required()->check(CLI::ExistingFile);
  owt->add_option("stack", in2, "Oriented stack (.fmap, K channels)")->required()->check(CLI::ExistingFile);
  owt->add_option("--epsilon", epsilon, "Arc simplification tolerance in pixels")->capture_default_str();
  owt->add_option("--convention", convention, "Channel read per edgel")
      ->capture_default_str()
      ->check(CLI::IsMember({"tangent", "normal"}));
  owt->add_option("-o,--out", out, "Output boundaries (.sb.json)")->required();

  auto* ucm = app.add_subcommand("ucm", "Build the ultrametric contour map of weighted boundaries");
  ucm->add_option("boundaries", in, "Input boundaries (.sb.json)")->required()->check(CLI::ExistingFile);
  ucm->add_option("-o,--out", out, "Output hierarchy (.ucm.json)")->required();
  ucm->add_option("--grid", grid, "Also write the dense UCM grid (.fmap)");

  auto* fuse = app.add_subcommand("fuse", "Project hierarchies onto fine boundaries and fuse them");
  fuse->add_option("--scale", scale_args, "Hierarchy and weight as path:weight (repeatable)")->required();
  fuse->add_option("--fine", fine, "Fine boundaries (.sb.json)")->required()->check(CLI::ExistingFile);
  fuse->add_option("--radius", radius, "Projection radius in pixels (default 0.0075 of the diagonal)");
  fuse->add_option("-o,--out", out, "Output hierarchy (.ucm.json)")->required();

  auto* threshold = app.add_subcommand("threshold", "Partition of a hierarchy at one level");
  threshold->add_option("hierarchy", in, "Input hierarchy (.ucm.json)")->required()->check(CLI::ExistingFile);
  threshold->add_option("--t", t, "Merges with level <= t are applied")->capture_default_str();
  threshold->add_option("-o,--out", out, "Output partition (.lmap)")->required();

  auto* eval_b = app.add_subcommand("eval-boundary", "Boundary precision-recall over a manifest");
  eval_b->add_option("--manifest", manifest, "Manifest (id, ucm.json, gt.lmap;...)")->required()->check(CLI::ExistingFile);
  eval_b->add_option("--max-dist", max_dist, "Matching tolerance as a fraction of the diagonal")->capture_default_str();
  eval_b->add_option("--thresholds", max_thresholds, "Maximum threshold count")->capture_default_str();
  eval_b->add_option("-o,--out", out, "Output curve (.tsv); summary goes to <stem>.summary.json")->required();
  add_jobs(eval_b);

  auto* eval_r = app.add_subcommand("eval-region", "Objects-and-parts precision-recall over a manifest");
  eval_r->add_option("--manifest", manifest, "Manifest (id, ucm.json, gt.lmap;...)")->required()->check(CLI::ExistingFile);
  eval_r->add_option("--thresholds", max_thresholds, "Maximum threshold count")->capture_default_str();
  eval_r->add_option("-o,--out", out, "Output curve (.tsv); summary goes to <stem>.summary.json")->required();
  add_jobs(eval_r);

  auto* eval_o = app.add_subcommand("eval-orient", "Orientation accuracy versus confidence percentile");
  eval_o->add_option("--pred", pred, "Predicted orientations (.orient.json)")->required()->check(CLI::ExistingFile);
  eval_o->add_option("--gt", gt, "Ground-truth orientations (.orient.json)")->required()->check(CLI::ExistingFile);
  eval_o->add_option("-o,--out", out, "Output curve (.tsv); AUC goes to <stem>.summary.json")->required();

  auto* orient_gt = app.add_subcommand("orient-gt", "Ground-truth orientations of a partition");
  orient_gt->add_option("partition", in, "Ground-truth partition (.lmap)")->required()->check(CLI::ExistingFile);
  orient_gt->add_option("--epsilon", epsilon, "Arc simplification tolerance in pixels")->capture_default_str();
  orient_gt->add_option("--bins", bins, "Orientation bins")->capture_default_str()->check(CLI::Range(2, 64));
  orient_gt->add_option("-o,--out", out, "Output orientations (.orient.json)")->required();

  auto* orient_grad = app.add_subcommand("orient-grad", "Local-gradient orientation baseline of a contour map");
  orient_grad->add_option("contour", in, "Contour strength (.fmap, one channel)")->required()->check(CLI::ExistingFile);
  orient_grad->add_option("--sigma", sigma, "Gradient smoothing scale")->capture_default_str();
  orient_grad->add_option("--bins", bins, "Orientation bins")->capture_default_str()->check(CLI::Range(2, 64));
  orient_grad->add_option("-o,--out", out, "Output orientations (.orient.json)")->required();

  auto* bench = app.add_subcommand("bench", "Time the sparse and dense pipelines on a synthetic image");
  bench->add_option("--size", size, "Image size HxW")->capture_default_str();
  bench->add_option("--mode", mode, "Which implementation to time")
      ->capture_default_str()
      ->check(CLI::IsMember({"sparse", "dense", "both"}));
  bench->add_option("--runs", runs, "Runs per stage (median reported)")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("-o,--out", out, "Output timings (.tsv); summary goes to <stem>.summary.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*detect) run_detect(in, sigmas, bins, out);
    if (*owt) run_owt(in, in2, epsilon, convention, out);
    if (*ucm) run_ucm(in, out, grid);
    if (*fuse) run_fuse(scale_args, fine, radius, out);
    if (*threshold) run_threshold(in, t, out);
    if (*eval_b) run_eval_boundary(manifest, max_dist, max_thresholds, jobs, out);
    if (*eval_r) run_eval_region(manifest, max_thresholds, jobs, out);
    if (*eval_o) run_eval_orient(pred, gt, out);
    if (*orient_gt) run_orient_gt(in, epsilon, bins, out);
    if (*orient_grad) run_orient_grad(in, sigma, bins, out);
    if (*bench) run_bench(size, mode, runs, out);
  } catch (const std::exception& e) {
    std::cerr << "cob: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
