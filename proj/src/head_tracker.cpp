// SPDX-License-Identifier: Apache-2.0
#include "flocktrack/head_tracker.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <set>

#include "flocktrack/color.hpp"
#include "flocktrack/error.hpp"

namespace flocktrack {

namespace {

int bin_of(double value, double lo, double hi, int bins) {
  const int b = static_cast<int>(std::floor((value - lo) / (hi - lo) * bins));
  return std::clamp(b, 0, bins - 1);
}

using PixelBins = std::array<std::uint16_t, 6>;

PixelBins compute_bins(Rgb raw, double gain, int bins) {
  const Rgb p = enhance_pixel(raw, gain);
  const Hsv hsv = rgb_to_hsv(p);
  const Lab lab = rgb_to_cielab(p);
  auto b = [bins](double v, double lo, double hi) {
    return static_cast<std::uint16_t>(bin_of(v, lo, hi, bins));
  };
  return {b(hsv.h, 0.0, 360.0), b(hsv.s, 0.0, 1.0), b(hsv.v, 0.0, 1.0),
          b(lab.l, 0.0, 100.0), b(lab.a, -128.0, 128.0), b(lab.b, -128.0, 128.0)};
}

// Direct-mapped memo of compute_bins keyed by the packed RGB value.
class BinCache {
 public:
  BinCache(double gain, int bins) : gain_(gain), bins_(bins), keys_(kSize, kEmpty), values_(kSize) {}

  bool matches(double gain, int bins) const { return gain == gain_ && bins == bins_; }

  const PixelBins& lookup(Rgb p) {
    const std::uint32_t key = (std::uint32_t{p.r} << 16) | (std::uint32_t{p.g} << 8) | p.b;
    const std::size_t slot = (key * 2654435761u) >> (32 - kBits);
    if (keys_[slot] != key) {
      keys_[slot] = key;
      values_[slot] = compute_bins(p, gain_, bins_);
    }
    return values_[slot];
  }

 private:
  static constexpr int kBits = 16;
  static constexpr std::size_t kSize = std::size_t{1} << kBits;
  static constexpr std::uint32_t kEmpty = 0xFFFFFFFFu;
  double gain_;
  int bins_;
  std::vector<std::uint32_t> keys_;
  std::vector<PixelBins> values_;
};

BinCache& bin_cache(const HeadConfig& cfg) {
  thread_local std::unique_ptr<BinCache> cache;
  if (!cache || !cache->matches(cfg.contrast_gain, cfg.bins)) {
    cache = std::make_unique<BinCache>(cfg.contrast_gain, cfg.bins);
  }
  return *cache;
}

// Per-pixel channel bins of the enhanced frame over a rectangle, so that
// overlapping candidate patches share the color conversions.
class BinnedRegion {
 public:
  BinnedRegion(const RgbImage& frame, int x0, int y0, int x1, int y1,
               const HeadConfig& cfg)
      : x0_(std::max(0, x0)), y0_(std::max(0, y0)),
        x1_(std::min(frame.width(), x1)), y1_(std::min(frame.height(), y1)),
        bins_(cfg.bins) {
    const int w = std::max(0, x1_ - x0_);
    const int h = std::max(0, y1_ - y0_);
    data_.resize(static_cast<std::size_t>(w) * h * 6);
    BinCache& cache = bin_cache(cfg);
    std::size_t k = 0;
    for (int y = y0_; y < y1_; ++y) {
      for (int x = x0_; x < x1_; ++x) {
        const auto& bins = cache.lookup(frame.at(x, y));
        for (int c = 0; c < 6; ++c) data_[k++] = bins[c];
      }
    }
  }

  // Histograms of [px0, px0 + size) x [py0, py0 + size) intersected with the
  // region.
  ChannelHistograms histograms(int px0, int py0, int size) const {
    ChannelHistograms out;
    for (auto& h : out) h.assign(bins_, 0.0);
    const int ax0 = std::max(px0, x0_), ax1 = std::min(px0 + size, x1_);
    const int ay0 = std::max(py0, y0_), ay1 = std::min(py0 + size, y1_);
    if (ax1 <= ax0 || ay1 <= ay0) {
      throw Error(ErrorCode::kEmptyCrop, "head patch has no pixels");
    }
    const int w = x1_ - x0_;
    for (int y = ay0; y < ay1; ++y) {
      const std::size_t row = static_cast<std::size_t>(y - y0_) * w;
      for (int x = ax0; x < ax1; ++x) {
        const std::uint16_t* px = &data_[(row + (x - x0_)) * 6];
        for (int c = 0; c < 6; ++c) out[c][px[c]] += 1.0;
      }
    }
    const double n = static_cast<double>(ax1 - ax0) * (ay1 - ay0);
    for (auto& h : out) {
      for (double& v : h) v /= n;
    }
    return out;
  }

 private:
  int x0_, y0_, x1_, y1_;
  int bins_;
  std::vector<std::uint16_t> data_;
};

int patch_origin(double center, int patch_size) {
  return static_cast<int>(std::lround(center)) - patch_size / 2;
}

bool within_threshold(double distance, const HeadConfig& cfg) {
  return !(distance > cfg.lost_threshold);
}

}  // namespace

Point clamp_patch_center(Point center, int patch_size, int width, int height) {
  const int half = patch_size / 2;
  auto clamp_axis = [&](double c, int extent) {
    const double lo = half;
    const double hi = std::max(lo, static_cast<double>(extent - patch_size + half));
    return std::clamp(static_cast<double>(std::lround(c)), lo, hi);
  };
  return {clamp_axis(center.x, width), clamp_axis(center.y, height)};
}

ChannelHistograms patch_histograms(const RgbImage& frame, Point center,
                                   const HeadConfig& cfg) {
  if (frame.empty()) throw Error(ErrorCode::kEmptyCrop, "empty image");
  const int x0 = patch_origin(center.x, cfg.patch_size);
  const int y0 = patch_origin(center.y, cfg.patch_size);
  BinnedRegion region(frame, x0, y0, x0 + cfg.patch_size, y0 + cfg.patch_size,
                      cfg);
  return region.histograms(x0, y0, cfg.patch_size);
}

double histogram_cosine_distance(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  if (a == b) {
    if (std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; })) {
      throw Error(ErrorCode::kZeroVector, "all-zero histogram");
    }
    return 0.0;
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorCode::kZeroVector, "all-zero histogram");
  }
  return std::clamp(1.0 - dot / std::sqrt(na * nb), 0.0, 1.0);
}

double combine_channel_distances(const std::array<double, 6>& d) {
  const double hsv =
      kHsvWeights[0] * d[0] + kHsvWeights[1] * d[1] + kHsvWeights[2] * d[2];
  const double lab =
      kLabWeights[0] * d[3] + kLabWeights[1] * d[4] + kLabWeights[2] * d[5];
  return hsv + lab;
}

double head_distance(const ChannelHistograms& candidate,
                     const ChannelHistograms& target) {
  std::array<double, 6> d{};
  for (int c = 0; c < 6; ++c) {
    d[c] = histogram_cosine_distance(candidate[c], target[c]);
  }
  return combine_channel_distances(d);
}

std::vector<Point> search_candidates(Point center, const HeadConfig& cfg,
                                     int width, int height) {
  const int reach = std::max(0, (cfg.search_window - cfg.patch_size) / 2);
  std::set<int> offsets = {-reach, reach};
  const int stride = std::max(1, cfg.search_stride);
  for (int k = 0; k * stride <= reach; ++k) {
    offsets.insert(k * stride);
    offsets.insert(-k * stride);
  }
  const Point base = clamp_patch_center(center, cfg.patch_size, width, height);
  std::set<std::pair<double, double>> unique;
  for (int oy : offsets) {
    for (int ox : offsets) {
      const Point c = clamp_patch_center({base.x + ox, base.y + oy},
                                         cfg.patch_size, width, height);
      unique.emplace(c.x, c.y);
    }
  }
  std::vector<Point> out;
  out.reserve(unique.size());
  for (const auto& [x, y] : unique) out.push_back({x, y});
  return out;
}

HeadState init_head(const RgbImage& frame, const BoundingBox& head_box,
                    int frame_index, const HeadConfig& cfg) {
  const Point center = clamp_patch_center(head_box.center(), cfg.patch_size,
                                          frame.width(), frame.height());
  HeadState s;
  s.target.histograms = patch_histograms(frame, center, cfg);
  s.target.center = center;
  s.target.patch_size = cfg.patch_size;
  s.target.last_update_frame = frame_index;
  s.current_center = center;
  s.status = HeadStatus::kTracked;
  s.last_match_distance = 0.0;
  return s;
}

std::pair<Point, double> search_head(const RgbImage& frame,
                                     const HeadState& state,
                                     const HeadConfig& cfg) {
  const std::vector<Point> cands =
      search_candidates(state.current_center, cfg, frame.width(), frame.height());
  const Point origin =
      clamp_patch_center(state.current_center, cfg.patch_size, frame.width(), frame.height());
  const int half = cfg.patch_size / 2;
  // Grid spacing is at most min(stride, reach); steps 2^k..1 reach 2^(k+1) - 1.
  const int reach = std::max(1, (cfg.search_window - cfg.patch_size) / 2);
  const int first_step = static_cast<int>(
      std::bit_floor(static_cast<unsigned>(std::max(1, std::min(cfg.search_stride, reach) / 2))));
  const int margin = cfg.refine ? 2 * first_step - 1 : 0;
  int rx0 = frame.width(), ry0 = frame.height(), rx1 = 0, ry1 = 0;
  for (const Point& c : cands) {
    rx0 = std::min(rx0, static_cast<int>(c.x) - half - margin);
    ry0 = std::min(ry0, static_cast<int>(c.y) - half - margin);
    rx1 = std::max(rx1, static_cast<int>(c.x) - half + cfg.patch_size + margin);
    ry1 = std::max(ry1, static_cast<int>(c.y) - half + cfg.patch_size + margin);
  }
  const BinnedRegion region(frame, rx0, ry0, rx1, ry1, cfg);
  auto score = [&](Point c) {
    return head_distance(region.histograms(static_cast<int>(c.x) - half,
                                           static_cast<int>(c.y) - half, cfg.patch_size),
                         state.target.histograms);
  };

  Point best = cands.front();
  double best_d = INFINITY;
  // Equal distances go to the candidate nearest the window center.
  auto consider = [&](Point c, double d) {
    if (d < best_d ||
        (d == best_d && distance(c, origin) < distance(best, origin))) {
      best_d = d;
      best = c;
    }
  };
  for (const Point& c : cands) consider(c, score(c));
  if (!cfg.refine) return {best, best_d};

  // Halving neighborhood search around the grid winner.
  for (int step = first_step; step >= 1; step /= 2) {
    const Point center = best;
    for (int dy = -step; dy <= step; dy += step) {
      for (int dx = -step; dx <= step; dx += step) {
        if (dx == 0 && dy == 0) continue;
        const Point c = clamp_patch_center({center.x + dx, center.y + dy}, cfg.patch_size,
                                           frame.width(), frame.height());
        consider(c, score(c));
      }
    }
  }
  return {best, best_d};
}

HeadState refresh_target(HeadState state, const RgbImage& frame,
                         int frame_index, double fps, const HeadConfig& cfg) {
  if (state.status != HeadStatus::kTracked) return state;
  if (frame_index - state.target.last_update_frame >= cfg.refresh_period_s * fps) {
    state.target.histograms = patch_histograms(frame, state.current_center, cfg);
    state.target.center = state.current_center;
    state.target.last_update_frame = frame_index;
  }
  return state;
}

HeadState detect_lost(HeadState state, const BoundingBox& body_box,
                      const HeadConfig& cfg) {
  if (!within_threshold(state.last_match_distance, cfg) ||
      !body_box.dilated(cfg.body_dilation).contains(state.current_center)) {
    state.status = HeadStatus::kLost;
  }
  return state;
}

HeadState recover_head(HeadState state, const RgbImage& frame,
                       const BoundingBox& body_box, const HeadConfig& cfg) {
  const BoundingBox area = body_box.dilated(cfg.body_dilation);
  const int stride = std::max(1, cfg.recovery_stride);
  const int half = cfg.patch_size / 2;
  const int cx0 = static_cast<int>(std::ceil(area.left()));
  const int cy0 = static_cast<int>(std::ceil(area.top()));
  const int cx1 = static_cast<int>(std::floor(area.right()));
  const int cy1 = static_cast<int>(std::floor(area.bottom()));

  std::set<std::pair<double, double>> unique;
  for (int x = cx0; x <= cx1; x += stride) {
    for (int y = cy0; y <= cy1; y += stride) {
      const Point c = clamp_patch_center({static_cast<double>(x), static_cast<double>(y)},
                                         cfg.patch_size, frame.width(), frame.height());
      // Recovered heads must satisfy the body prior checked by detect_lost.
      if (area.contains(c)) unique.emplace(c.x, c.y);
    }
  }
  if (unique.empty()) return state;

  const BinnedRegion region(frame, cx0 - half - 1, cy0 - half - 1,
                            cx1 + cfg.patch_size, cy1 + cfg.patch_size, cfg);
  Point best;
  double best_d = INFINITY;
  for (const auto& [x, y] : unique) {
    const double d = head_distance(
        region.histograms(static_cast<int>(x) - half, static_cast<int>(y) - half,
                          cfg.patch_size),
        state.target.histograms);
    if (d < best_d) {
      best_d = d;
      best = {x, y};
    }
  }
  if (within_threshold(best_d, cfg)) {
    state.status = HeadStatus::kTracked;
    state.current_center = best;
    state.last_match_distance = best_d;
  }
  return state;
}

HeadState step_head(HeadState state, const RgbImage& frame,
                    const BoundingBox& body_box, int frame_index, double fps,
                    const HeadConfig& cfg) {
  if (state.status == HeadStatus::kTracked) {
    const auto [center, d] = search_head(frame, state, cfg);
    state.current_center = center;
    state.last_match_distance = d;
    state = detect_lost(std::move(state), body_box, cfg);
    if (state.status == HeadStatus::kTracked) {
      state = refresh_target(std::move(state), frame, frame_index, fps, cfg);
    }
    return state;
  }
  return recover_head(std::move(state), frame, body_box, cfg);
}

}  // namespace flocktrack
