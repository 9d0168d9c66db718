// SPDX-License-Identifier: Apache-2.0
//
// Color-histogram head tracking. Each head is described by six per-channel
// histograms (H, S, V from HSV and L, a, b from CIELAB) of a square patch
// taken from a saturation-boosted frame. Candidates are compared to the
// target with per-channel cosine distances combined by fixed weights.

#pragma once

#include <array>
#include <utility>
#include <vector>

#include "flocktrack/image.hpp"
#include "flocktrack/types.hpp"

namespace flocktrack {

struct HeadConfig {
  bool enabled = true;
  int patch_size = 25;
  int search_window = 50;
  int search_stride = 20;  // patch_size minus the 5 px overlap
  int recovery_stride = 5;
  int bins = 32;
  double contrast_gain = 1.5;
  double lost_threshold = 0.35;
  double refresh_period_s = 3.0;
  double body_dilation = 0.10;  // per side, as a fraction of box extent
  // Shift the search window with the body between frames.
  bool follow_body = true;
  // Refine the grid winner with a halving neighborhood search.
  bool refine = true;
};

inline constexpr std::array<double, 3> kHsvWeights = {4.0 / 5.0, 1.0 / 10.0, 1.0 / 10.0};
inline constexpr std::array<double, 3> kLabWeights = {2.0 / 5.0, 2.0 / 5.0, 1.0 / 5.0};

static_assert(kHsvWeights[0] + kHsvWeights[1] + kHsvWeights[2] > 1.0 - 1e-12 &&
              kHsvWeights[0] + kHsvWeights[1] + kHsvWeights[2] < 1.0 + 1e-12);
static_assert(kLabWeights[0] + kLabWeights[1] + kLabWeights[2] > 1.0 - 1e-12 &&
              kLabWeights[0] + kLabWeights[1] + kLabWeights[2] < 1.0 + 1e-12);

enum class Channel { kH = 0, kS, kV, kL, kA, kB };

// Normalized histograms in channel order H, S, V, L, a, b.
using ChannelHistograms = std::array<std::vector<double>, 6>;

struct HeadTarget {
  ChannelHistograms histograms;
  Point center;
  int patch_size = 25;
  int last_update_frame = 0;
};

enum class HeadStatus { kTracked, kLost };

struct HeadState {
  HeadTarget target;
  Point current_center;
  HeadStatus status = HeadStatus::kTracked;
  double last_match_distance = 0.0;
};

// Histograms of the patch centered on `center` (clamped into the image).
// Throws kEmptyCrop when the clamped patch has no pixels.
ChannelHistograms patch_histograms(const RgbImage& frame, Point center,
                                   const HeadConfig& cfg = {});

// Per-channel cosine distance of two histograms. Throws kZeroVector.
double histogram_cosine_distance(const std::vector<double>& a,
                                 const std::vector<double>& b);

// Weighted HSV distance plus weighted Lab distance; in [0, 2].
double head_distance(const ChannelHistograms& candidate,
                     const ChannelHistograms& target);

// Combines six per-channel distances with the fixed weights.
double combine_channel_distances(const std::array<double, 6>& d);

// Patch center after clamping the patch inside the image.
Point clamp_patch_center(Point center, int patch_size, int width, int height);

// Candidate patch centers for the search window around `center`, in
// lexicographic (x, y) order.
std::vector<Point> search_candidates(Point center, const HeadConfig& cfg,
                                     int width, int height);

HeadState init_head(const RgbImage& frame, const BoundingBox& head_box,
                    int frame_index, const HeadConfig& cfg = {});

std::pair<Point, double> search_head(const RgbImage& frame,
                                     const HeadState& state,
                                     const HeadConfig& cfg = {});

HeadState refresh_target(HeadState state, const RgbImage& frame,
                         int frame_index, double fps,
                         const HeadConfig& cfg = {});

HeadState detect_lost(HeadState state, const BoundingBox& body_box,
                      const HeadConfig& cfg = {});

HeadState recover_head(HeadState state, const RgbImage& frame,
                       const BoundingBox& body_box,
                       const HeadConfig& cfg = {});

// One frame of head tracking: search, lost check and refresh while tracked,
// recovery while lost.
HeadState step_head(HeadState state, const RgbImage& frame,
                    const BoundingBox& body_box, int frame_index, double fps,
                    const HeadConfig& cfg = {});

}  // namespace flocktrack
