// SPDX-License-Identifier: Apache-2.0
#include "flocktrack/appearance.hpp"

#include <algorithm>
#include <cmath>

#include "flocktrack/color.hpp"
#include "flocktrack/error.hpp"

namespace flocktrack {

namespace {

int bin_of(double unit, int bins) {
  return std::clamp(static_cast<int>(std::floor(unit * bins)), 0, bins - 1);
}

// Length of [i, i + 1) inside [lo, hi].
double pixel_overlap(int i, double lo, double hi) {
  return std::max(0.0, std::min(hi, i + 1.0) - std::max(lo, static_cast<double>(i)));
}

}  // namespace

void FeatureGallery::push(AppearanceFeature f) {
  features_.push_back(std::move(f));
  while (static_cast<int>(features_.size()) > budget_) features_.pop_front();
}

AppearanceFeature HistogramExtractor::extract(const RgbImage& frame,
                                              const BoundingBox& box) const {
  return extract_feature(frame, box, cfg_);
}

AppearanceFeature extract_feature(const RgbImage& frame, const BoundingBox& box,
                                  const AppearanceConfig& cfg) {
  if (frame.empty()) throw Error(ErrorCode::kEmptyCrop, "empty image");
  const double x0 = std::max(0.0, box.left());
  const double x1 = std::min(static_cast<double>(frame.width()), box.right());
  const double y0 = std::max(0.0, box.top());
  const double y1 = std::min(static_cast<double>(frame.height()), box.bottom());
  if (!(x1 > x0 && y1 > y0)) {
    throw Error(ErrorCode::kEmptyCrop, "box does not overlap the image");
  }

  const int hb = cfg.h_bins, sb = cfg.s_bins, vb = cfg.v_bins;
  std::vector<double> hist(static_cast<std::size_t>(hb * sb * vb), 0.0);
  const int ix0 = static_cast<int>(std::floor(x0));
  const int ix1 = static_cast<int>(std::ceil(x1));
  const int iy0 = static_cast<int>(std::floor(y0));
  const int iy1 = static_cast<int>(std::ceil(y1));
  for (int y = iy0; y < iy1; ++y) {
    const double wy = pixel_overlap(y, y0, y1);
    if (wy <= 0.0) continue;
    for (int x = ix0; x < ix1; ++x) {
      const double wx = pixel_overlap(x, x0, x1);
      if (wx <= 0.0) continue;
      const Hsv c = rgb_to_hsv(frame.at(x, y));
      const int idx = (bin_of(c.h / 360.0, hb) * sb + bin_of(c.s, sb)) * vb +
                      bin_of(c.v, vb);
      hist[idx] += wx * wy;
    }
  }
  double norm = 0.0;
  for (double v : hist) norm += v * v;
  norm = std::sqrt(norm);
  for (double& v : hist) v /= norm;
  return {std::move(hist)};
}

double cosine_distance(const AppearanceFeature& a, const FeatureGallery& g) {
  if (g.empty()) throw Error(ErrorCode::kEmptyGallery, "empty feature gallery");
  double best = INFINITY;
  for (const AppearanceFeature& m : g.features()) {
    // Rounding in the dot product must not hide an exact self-match.
    if (m.values == a.values) return 0.0;
    double dot = 0.0;
    const std::size_t n = std::min(a.values.size(), m.values.size());
    for (std::size_t i = 0; i < n; ++i) dot += a.values[i] * m.values[i];
    best = std::min(best, 1.0 - dot);
  }
  return std::clamp(best, 0.0, 2.0);
}

}  // namespace flocktrack
