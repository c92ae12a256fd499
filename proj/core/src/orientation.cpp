#include "cob/orientation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>

#include "cob/filters.hpp"
#include "cob/partition.hpp"
#include "cob/polyline.hpp"
#include "cob/watershed.hpp"

namespace cob {

namespace {
// Gradient energy below this is filter round-off on a flat map.
constexpr double kFlatFloor = 1e-9;
}  // namespace

OrientationField gt_orientations(const LabelMap& gt, double epsilon, int bins) {
  const SparseBoundaries sb = sparse_from_labels(gt);
  const ArcGeometry geom = arc_orientations(sb, epsilon, bins);
  const int cols = 2 * gt.width() - 1;
  std::vector<int> edgel_bin(static_cast<std::size_t>(2 * gt.height() - 1) * cols, -1);
  for (const auto& [key, arc] : geom.arcs) {
    for (const OrientedEdgel& oe : arc) edgel_bin[static_cast<std::size_t>(oe.edgel.row) * cols + oe.edgel.col] = oe.bin;
  }
  OrientationField field{gt.height(), gt.width(), bins, {}};
  for (int r = 0; r < gt.height(); ++r) {
    for (int c = 0; c < gt.width(); ++c) {
      int bin = -1;
      if (c + 1 < gt.width()) bin = edgel_bin[static_cast<std::size_t>(2 * r) * cols + 2 * c + 1];
      if (bin < 0 && r + 1 < gt.height()) bin = edgel_bin[static_cast<std::size_t>(2 * r + 1) * cols + 2 * c];
      if (bin >= 0) field.records.push_back({r, c, bin, 1.0});
    }
  }
  return field;
}

OrientationField local_gradient_orientation(const FloatMap& contour, double sigma, int bins) {
  if (contour.channels() != 1) throw DimensionError("orientation baseline expects a single-channel map");
  const int h = contour.height();
  const int w = contour.width();
  const auto d = gaussian_derivatives(contour, 0, sigma);
  const std::size_t n = contour.plane_size();
  // Work in y-up coordinates so angles follow segment_angle().
  std::vector<double> jxx(n), jxy(n), jyy(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double gx = d.x[i];
    const double gy = -d.y[i];
    jxx[i] = gx * gx;
    jxy[i] = gx * gy;
    jyy[i] = gy * gy;
  }
  const auto g = gaussian_kernel(sigma, 0);
  jxx = separable_filter(jxx, h, w, g, g);
  jxy = separable_filter(jxy, h, w, g, g);
  jyy = separable_filter(jyy, h, w, g, g);

  std::vector<double> energy(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double half_diff = 0.5 * (jxx[i] - jyy[i]);
    const double lambda = 0.5 * (jxx[i] + jyy[i]) + std::sqrt(half_diff * half_diff + jxy[i] * jxy[i]);
    energy[i] = std::sqrt(std::max(0.0, lambda));
    peak = std::max(peak, energy[i]);
  }
  OrientationField field{h, w, bins, {}};
  field.records.reserve(n);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      const double normal = 0.5 * std::atan2(2.0 * jxy[i], jxx[i] - jyy[i]);
      const double tangent = normal + 0.5 * std::numbers::pi;
      const double conf = peak > kFlatFloor ? std::clamp(energy[i] / peak, 0.0, 1.0) : 0.0;
      field.records.push_back({r, c, orientation_bin(tangent, bins), conf});
    }
  }
  return field;
}

double mean_class_accuracy(std::span<const int> predicted, std::span<const int> truth, int bins) {
  std::vector<std::size_t> hit(bins, 0), total(bins, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++total[truth[i]];
    if (predicted[i] == truth[i]) ++hit[truth[i]];
  }
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < bins; ++c) {
    if (total[c] == 0) continue;
    sum += static_cast<double>(hit[c]) / static_cast<double>(total[c]);
    ++present;
  }
  return present ? sum / present : 0.0;
}

OrientationCurve orient_accuracy(const OrientationField& pred, const OrientationField& gt) {
  if (gt.records.empty()) throw Error("orientation ground truth is empty");
  if (pred.records.empty()) throw Error("orientation prediction is empty");
  if (pred.height != gt.height || pred.width != gt.width) throw DimensionError("orientation fields differ in size");
  if (pred.bins != gt.bins) throw DimensionError("orientation fields use different bin counts");
  const int h = gt.height;
  const int w = gt.width;
  const int bins = gt.bins;

  // Nearest predicted record for every pixel (multi-source BFS, 4-neighborhood).
  std::vector<int> nearest(static_cast<std::size_t>(h) * w, -1);
  std::deque<int> frontier;
  for (std::size_t k = 0; k < pred.records.size(); ++k) {
    const auto& rec = pred.records[k];
    if (rec.row < 0 || rec.row >= h || rec.col < 0 || rec.col >= w) throw DimensionError("record outside the image");
    const int p = rec.row * w + rec.col;
    if (nearest[p] < 0) {
      nearest[p] = static_cast<int>(k);
      frontier.push_back(p);
    }
  }
  while (!frontier.empty()) {
    const int p = frontier.front();
    frontier.pop_front();
    const int r = p / w;
    const int c = p % w;
    auto visit = [&](int q) {
      if (nearest[q] < 0) {
        nearest[q] = nearest[p];
        frontier.push_back(q);
      }
    };
    if (r > 0) visit(p - w);
    if (c > 0) visit(p - 1);
    if (c + 1 < w) visit(p + 1);
    if (r + 1 < h) visit(p + w);
  }

  struct Sample {
    double confidence;
    int predicted;
    int truth;
  };
  std::vector<Sample> samples;
  samples.reserve(gt.records.size());
  for (const auto& rec : gt.records) {
    if (rec.row < 0 || rec.row >= h || rec.col < 0 || rec.col >= w) throw DimensionError("record outside the image");
    if (rec.bin < 0 || rec.bin >= bins) throw Error("ground-truth bin out of range");
    const auto& p = pred.records[nearest[rec.row * w + rec.col]];
    samples.push_back({p.confidence, p.bin, rec.bin});
  }
  std::stable_sort(samples.begin(), samples.end(),
                   [](const Sample& a, const Sample& b) { return a.confidence > b.confidence; });

  const std::size_t n = samples.size();
  std::vector<std::size_t> hit(bins, 0), total(bins, 0);
  std::size_t taken = 0;
  OrientationCurve curve;
  for (int p = 1; p <= 100; ++p) {
    std::size_t k = std::max<std::size_t>(1, (static_cast<std::size_t>(p) * n + 99) / 100);
    while (k < n && samples[k].confidence == samples[k - 1].confidence) ++k;
    for (; taken < k; ++taken) {
      const Sample& s = samples[taken];
      ++total[s.truth];
      if (s.predicted == s.truth) ++hit[s.truth];
    }
    double sum = 0.0;
    int present = 0;
    for (int c = 0; c < bins; ++c) {
      if (total[c] == 0) continue;
      sum += static_cast<double>(hit[c]) / static_cast<double>(total[c]);
      ++present;
    }
    curve.points.push_back({p, present ? sum / present : 0.0});
  }
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    area += 0.5 * (curve.points[i].accuracy + curve.points[i + 1].accuracy);
  }
  curve.auc = area / static_cast<double>(curve.points.size() - 1);
  return curve;
}

}  // namespace cob
