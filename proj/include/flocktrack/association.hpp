// SPDX-License-Identifier: Apache-2.0
//
// Per-frame data association: gated Mahalanobis plus appearance costs,
// a matching cascade ordered by track staleness, and an IOU fallback for
// tentative and just-missed tracks.

#pragma once

#include <span>
#include <vector>

#include "flocktrack/appearance.hpp"
#include "flocktrack/assignment.hpp"
#include "flocktrack/track.hpp"

namespace flocktrack {

struct AssociationConfig {
  double lambda = 0.0;        // weight of the normalized Mahalanobis term
  double cos_gate = 0.25;
  double maha_gate = 5.9915;  // chi-square 0.95 quantile, 2 dof
  double iou_gate = 0.3;      // minimum IOU in the fallback stage
};

// One cost row per entry of `track_indices`, one column per entry of
// `det_indices`. `features` is indexed like `detections`; pass an empty span
// to associate on motion alone.
CostMatrix build_costs(std::span<const Track> tracks,
                       std::span<const int> track_indices,
                       std::span<const Detection> detections,
                       std::span<const int> det_indices,
                       std::span<const AppearanceFeature> features,
                       const AssociationConfig& cfg = {},
                       const MotionConfig& motion = {});

// Result indices refer to `tracks` and `detections` directly.
AssignmentResult matching_cascade(std::span<const Track> tracks,
                                  std::span<const Detection> detections,
                                  std::span<const AppearanceFeature> features,
                                  int max_age,
                                  const AssociationConfig& cfg = {},
                                  const MotionConfig& motion = {});

}  // namespace flocktrack
