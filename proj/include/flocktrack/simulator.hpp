// SPDX-License-Identifier: Apache-2.0
//
// Deterministic synthetic flock: birds wander a flat pen, pause, and make
// scripted feeder / drinker visits. Produces ground truth (body and head
// boxes, behavior events), a corrupted detection stream, a labelled
// hypothesis stream with known error counts, and rendered frames.

#pragma once

#include <cstdint>
#include <vector>

#include "flocktrack/behavior.hpp"
#include "flocktrack/image.hpp"
#include "flocktrack/types.hpp"

namespace flocktrack {

struct SwapEvent {
  int frame = 0;
  int a = 0;  // bird ids, 1-based
  int b = 0;
};

// Inclusive frame range for one bird.
struct FrameSpan {
  int bird = 0;
  int start = 0;
  int end = 0;
};

struct CorruptionConfig {
  double miss_rate = 0.0;     // per object-frame; frame 0 is never dropped
  double fp_rate = 0.0;       // spurious boxes per frame
  double jitter_sigma = 0.0;  // px, per axis, truncated at 4 sigma
  std::vector<SwapEvent> swaps;
  std::vector<FrameSpan> occlusions;       // bird hidden and undetected
  std::vector<FrameSpan> head_occlusions;  // head drawn in body color
};

struct SimConfig {
  std::uint64_t seed = 1;
  int n_birds = 5;
  double clip_s = 60.0;
  VideoMeta video;
  PenLayout layout;  // empty -> default_layout(video)

  double speed_min = 45.0;  // px/s
  double speed_max = 90.0;
  double turn_rate_deg = 120.0;  // per second
  double visit_probability = 0.35;
  double dwell_min_s = 10.0;
  double dwell_max_s = 20.0;

  double body_half_w = 30.0;
  double body_half_h = 22.0;
  double head_radius = 10.0;
  double head_offset = 16.0;
  double min_separation = 75.0;
  double keep_out = 60.0;  // body-center clearance from fixtures

  // Ground-truth walking rule, matching the detector's defaults.
  double walk_threshold_px = 60.0;
  double merge_gap_s = 3.0;

  CorruptionConfig corruption;

  // Throws kConfig.
  void validate() const;
  int frame_count() const;
};

PenLayout default_layout(const VideoMeta& video);

struct BirdState {
  Point center;
  double heading = 0.0;  // radians, image coordinates
  Point head;
  bool visible = true;
  bool head_visible = true;
};

struct InjectedCounts {
  long objects = 0;
  long misses = 0;
  long false_positives = 0;
  long mismatches = 0;
  long matches = 0;
  double jitter_sum = 0.0;  // sum of center offsets over emitted boxes

  double expected_mota() const {
    return 1.0 - static_cast<double>(misses + false_positives + mismatches) /
                     static_cast<double>(objects);
  }
  double expected_motp() const { return jitter_sum / static_cast<double>(matches); }
};

struct SimOutput {
  SimConfig config;  // with the layout filled in
  std::vector<std::vector<BirdState>> states;  // [frame][bird]
  std::vector<TrackRecord> ground_truth;       // ids 1..n_birds, heads set
  std::vector<BehaviorEvent> behavior;         // frame intervals
  std::vector<Detection> detections;           // frame-0 rows carry head_init
  std::vector<TrackRecord> hypotheses;         // detections with scripted labels
  InjectedCounts injected;

  int frame_count() const { return static_cast<int>(states.size()); }
};

SimOutput simulate(const SimConfig& cfg);

// Pen floor and fixtures without birds.
RgbImage render_background(const SimConfig& cfg);
// `background`, when given, must come from render_background(sim.config).
RgbImage render_frame(const SimOutput& sim, int frame,
                      const RgbImage* background = nullptr);

// Head hue in degrees for bird index i of n, spread over blue..red.
double head_hue(int index, int n_birds);

}  // namespace flocktrack
