// SPDX-License-Identifier: Apache-2.0
//
// Whole-body appearance embedding used for re-identification. The default
// extractor is a joint HSV color histogram; anything producing unit-norm,
// non-negative vectors of a fixed length can be plugged in instead.

#pragma once

#include <deque>
#include <memory>
#include <vector>

#include "flocktrack/image.hpp"
#include "flocktrack/types.hpp"

namespace flocktrack {

struct AppearanceConfig {
  bool enabled = true;
  int gallery_budget = 100;
  int h_bins = 8;
  int s_bins = 8;
  int v_bins = 4;
};

struct AppearanceFeature {
  std::vector<double> values;  // unit L2 norm

  friend bool operator==(const AppearanceFeature&,
                         const AppearanceFeature&) = default;
};

// Bounded FIFO of past features for one track.
class FeatureGallery {
 public:
  explicit FeatureGallery(int budget = 100) : budget_(budget) {}

  void push(AppearanceFeature f);
  int budget() const { return budget_; }
  std::size_t size() const { return features_.size(); }
  bool empty() const { return features_.empty(); }
  const std::deque<AppearanceFeature>& features() const { return features_; }

 private:
  int budget_;
  std::deque<AppearanceFeature> features_;
};

class AppearanceExtractor {
 public:
  virtual ~AppearanceExtractor() = default;
  virtual AppearanceFeature extract(const RgbImage& frame,
                                    const BoundingBox& box) const = 0;
};

class HistogramExtractor final : public AppearanceExtractor {
 public:
  explicit HistogramExtractor(const AppearanceConfig& cfg = {}) : cfg_(cfg) {}
  AppearanceFeature extract(const RgbImage& frame,
                            const BoundingBox& box) const override;

 private:
  AppearanceConfig cfg_;
};

// Area-weighted HSV histogram of the box crop (clipped to the image),
// L2-normalized. Throws kEmptyCrop when the clipped crop has no area.
AppearanceFeature extract_feature(const RgbImage& frame, const BoundingBox& box,
                                  const AppearanceConfig& cfg = {});

// min over gallery members of (1 - a . member). Throws kEmptyGallery.
double cosine_distance(const AppearanceFeature& a, const FeatureGallery& g);

inline FeatureGallery push_feature(FeatureGallery g, AppearanceFeature f) {
  g.push(std::move(f));
  return g;
}

}  // namespace flocktrack
