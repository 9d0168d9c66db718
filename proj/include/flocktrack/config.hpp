// SPDX-License-Identifier: Apache-2.0
//
// Pipeline configuration and its JSON form. Every section and key is
// optional; omitted keys keep their defaults and unknown keys are rejected.
//
//   {
//     "video":       {"width": 1280, "height": 720, "fps": 30, "frame_count": 0},
//     "pen":         {"bounds": [x0, y0, x1, y1], "feeder": [[x, y], ...], "drinker": [...]},
//     "motion":      {"confirm_hits", "max_age", "std_weight_position", ...},
//     "appearance":  {"enabled", "gallery_budget", "h_bins", "s_bins", "v_bins"},
//     "association": {"lambda", "cos_gate", "maha_gate", "iou_gate"},
//     "head":        {"enabled", "patch_size", "search_window", ...},
//     "behavior":    {"threshold_px", "window_s", ...},
//     "metrics":     {"match_radius", "skip_frames"},
//     "paths":       {"detections", "frames", "out", "gt", "gt_behavior"}
//   }

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "flocktrack/appearance.hpp"
#include "flocktrack/association.hpp"
#include "flocktrack/behavior.hpp"
#include "flocktrack/head_tracker.hpp"
#include "flocktrack/kalman.hpp"
#include "flocktrack/types.hpp"

namespace flocktrack {

struct MetricsConfig {
  double match_radius = 50.0;  // px, center distance
  // Frames before this index are left out of scoring (tracker burn-in).
  int skip_frames = 0;
};

struct PathsConfig {
  std::string detections;
  std::string frames;
  std::string out;
  std::string gt;
  std::string gt_behavior;
};

struct PipelineConfig {
  VideoMeta video;
  int frame_count = 0;  // 0: last detection frame + 1
  PenLayout layout;
  MotionConfig motion;
  AppearanceConfig appearance;
  AssociationConfig association;
  HeadConfig head;
  BehaviorConfig behavior;
  MetricsConfig metrics;
  PathsConfig paths;

  // Throws kConfig on out-of-range values.
  void validate() const;
  bool needs_frames() const { return appearance.enabled || head.enabled; }
};

// Throws kConfig with the offending key on malformed input.
PipelineConfig parse_config(std::string_view json_text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& cfg);
void save_config(const std::filesystem::path& path, const PipelineConfig& cfg);

}  // namespace flocktrack
