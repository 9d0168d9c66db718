// SPDX-License-Identifier: Apache-2.0
#include "flocktrack/config.hpp"

#include <fstream>
#include <sstream>

#include "json_support.hpp"

namespace flocktrack {

using detail::check_keys;
using detail::json;
using detail::read_key;

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kConfig, "invalid config: " + what);
}

}  // namespace

void PipelineConfig::validate() const {
  require(video.valid(), "video width, height and fps must be positive");
  require(frame_count >= 0, "video.frame_count must be >= 0");
  if (!layout.empty()) layout.validate();

  require(motion.confirm_hits >= 1, "motion.confirm_hits must be >= 1");
  require(motion.max_age >= 0, "motion.max_age must be >= 0");
  require(motion.std_weight_position > 0 && motion.std_weight_velocity > 0 &&
              motion.std_weight_measurement > 0,
          "motion noise weights must be positive");
  require(motion.process_noise_scale > 0 && motion.measurement_noise_scale > 0,
          "motion noise scales must be positive");
  require(motion.size_smoothing > 0 && motion.size_smoothing <= 1,
          "motion.size_smoothing must lie in (0, 1]");

  require(appearance.gallery_budget >= 1, "appearance.gallery_budget must be >= 1");
  require(appearance.h_bins >= 1 && appearance.s_bins >= 1 && appearance.v_bins >= 1,
          "appearance bins must be >= 1");

  require(association.lambda >= 0 && association.lambda <= 1, "association.lambda must lie in [0, 1]");
  require(association.cos_gate > 0, "association.cos_gate must be positive");
  require(association.maha_gate > 0, "association.maha_gate must be positive");
  require(association.iou_gate >= 0 && association.iou_gate <= 1,
          "association.iou_gate must lie in [0, 1]");

  require(head.patch_size >= 3, "head.patch_size must be >= 3");
  require(head.search_window >= head.patch_size, "head.search_window must be >= patch_size");
  require(head.search_stride >= 1 && head.recovery_stride >= 1, "head strides must be >= 1");
  require(head.bins >= 2, "head.bins must be >= 2");
  require(head.contrast_gain >= 1, "head.contrast_gain must be >= 1");
  require(head.lost_threshold > 0 && head.lost_threshold <= 2,
          "head.lost_threshold must lie in (0, 2]");
  require(head.refresh_period_s > 0, "head.refresh_period_s must be positive");
  require(head.body_dilation >= 0, "head.body_dilation must be >= 0");

  require(behavior.threshold_px > 0, "behavior.threshold_px must be positive");
  require(behavior.window_s > 0, "behavior.window_s must be positive");
  require(behavior.threshold_body_lengths_per_s >= 0,
          "behavior.threshold_body_lengths_per_s must be >= 0");
  require(behavior.speed_halfwindow_s > 0, "behavior.speed_halfwindow_s must be positive");
  require(behavior.max_gap_s >= 0 && behavior.margin_px >= 0 && behavior.min_dwell_s >= 0 &&
              behavior.min_gap_s >= 0,
          "behavior durations and margins must be >= 0");

  require(metrics.match_radius > 0, "metrics.match_radius must be positive");
  require(metrics.skip_frames >= 0, "metrics.skip_frames must be >= 0");
}

PipelineConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, {"video", "pen", "motion", "appearance", "association", "head",
                    "behavior", "metrics", "paths"},
             "config");
  PipelineConfig c;

  if (root.contains("video")) {
    const json& j = root["video"];
    check_keys(j, {"width", "height", "fps", "frame_count"}, "video");
    read_key(j, "width", c.video.width, "video");
    read_key(j, "height", c.video.height, "video");
    read_key(j, "fps", c.video.fps, "video");
    read_key(j, "frame_count", c.frame_count, "video");
  }
  if (root.contains("pen")) c.layout = detail::layout_from_json(root["pen"], c.video, "pen");

  if (root.contains("motion")) {
    const json& j = root["motion"];
    const std::string w = "motion";
    check_keys(j, {"confirm_hits", "max_age", "std_weight_position", "std_weight_velocity",
                   "std_weight_measurement", "process_noise_scale",
                   "measurement_noise_scale", "size_smoothing"},
               w);
    read_key(j, "confirm_hits", c.motion.confirm_hits, w);
    read_key(j, "max_age", c.motion.max_age, w);
    read_key(j, "std_weight_position", c.motion.std_weight_position, w);
    read_key(j, "std_weight_velocity", c.motion.std_weight_velocity, w);
    read_key(j, "std_weight_measurement", c.motion.std_weight_measurement, w);
    read_key(j, "process_noise_scale", c.motion.process_noise_scale, w);
    read_key(j, "measurement_noise_scale", c.motion.measurement_noise_scale, w);
    read_key(j, "size_smoothing", c.motion.size_smoothing, w);
  }
  if (root.contains("appearance")) {
    const json& j = root["appearance"];
    const std::string w = "appearance";
    check_keys(j, {"enabled", "gallery_budget", "h_bins", "s_bins", "v_bins"}, w);
    read_key(j, "enabled", c.appearance.enabled, w);
    read_key(j, "gallery_budget", c.appearance.gallery_budget, w);
    read_key(j, "h_bins", c.appearance.h_bins, w);
    read_key(j, "s_bins", c.appearance.s_bins, w);
    read_key(j, "v_bins", c.appearance.v_bins, w);
  }
  if (root.contains("association")) {
    const json& j = root["association"];
    const std::string w = "association";
    check_keys(j, {"lambda", "cos_gate", "maha_gate", "iou_gate"}, w);
    read_key(j, "lambda", c.association.lambda, w);
    read_key(j, "cos_gate", c.association.cos_gate, w);
    read_key(j, "maha_gate", c.association.maha_gate, w);
    read_key(j, "iou_gate", c.association.iou_gate, w);
  }
  if (root.contains("head")) {
    const json& j = root["head"];
    const std::string w = "head";
    check_keys(j, {"enabled", "patch_size", "search_window", "search_stride",
                   "recovery_stride", "bins", "contrast_gain", "lost_threshold",
                   "refresh_period_s", "body_dilation", "follow_body", "refine"},
               w);
    read_key(j, "enabled", c.head.enabled, w);
    read_key(j, "patch_size", c.head.patch_size, w);
    read_key(j, "search_window", c.head.search_window, w);
    read_key(j, "search_stride", c.head.search_stride, w);
    read_key(j, "recovery_stride", c.head.recovery_stride, w);
    read_key(j, "bins", c.head.bins, w);
    read_key(j, "contrast_gain", c.head.contrast_gain, w);
    read_key(j, "lost_threshold", c.head.lost_threshold, w);
    read_key(j, "refresh_period_s", c.head.refresh_period_s, w);
    read_key(j, "body_dilation", c.head.body_dilation, w);
    read_key(j, "follow_body", c.head.follow_body, w);
    read_key(j, "refine", c.head.refine, w);
  }
  if (root.contains("behavior")) {
    const json& j = root["behavior"];
    const std::string w = "behavior";
    check_keys(j, {"threshold_px", "window_s", "threshold_body_lengths_per_s",
                   "use_displacement", "speed_halfwindow_s", "max_gap_s", "margin_px",
                   "min_dwell_s", "min_gap_s"},
               w);
    read_key(j, "threshold_px", c.behavior.threshold_px, w);
    read_key(j, "window_s", c.behavior.window_s, w);
    read_key(j, "threshold_body_lengths_per_s", c.behavior.threshold_body_lengths_per_s, w);
    read_key(j, "use_displacement", c.behavior.use_displacement, w);
    read_key(j, "speed_halfwindow_s", c.behavior.speed_halfwindow_s, w);
    read_key(j, "max_gap_s", c.behavior.max_gap_s, w);
    read_key(j, "margin_px", c.behavior.margin_px, w);
    read_key(j, "min_dwell_s", c.behavior.min_dwell_s, w);
    read_key(j, "min_gap_s", c.behavior.min_gap_s, w);
  }
  if (root.contains("metrics")) {
    const json& j = root["metrics"];
    check_keys(j, {"match_radius", "skip_frames"}, "metrics");
    read_key(j, "match_radius", c.metrics.match_radius, "metrics");
    read_key(j, "skip_frames", c.metrics.skip_frames, "metrics");
  }
  if (root.contains("paths")) {
    const json& j = root["paths"];
    check_keys(j, {"detections", "frames", "out", "gt", "gt_behavior"}, "paths");
    read_key(j, "detections", c.paths.detections, "paths");
    read_key(j, "frames", c.paths.frames, "paths");
    read_key(j, "out", c.paths.out, "paths");
    read_key(j, "gt", c.paths.gt, "paths");
    read_key(j, "gt_behavior", c.paths.gt_behavior, "paths");
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInput, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string config_to_json(const PipelineConfig& c) {
  json root;
  root["video"] = {{"width", c.video.width},
                   {"height", c.video.height},
                   {"fps", c.video.fps},
                   {"frame_count", c.frame_count}};
  if (!c.layout.empty()) root["pen"] = detail::layout_to_json(c.layout);
  root["motion"] = {{"confirm_hits", c.motion.confirm_hits},
                    {"max_age", c.motion.max_age},
                    {"std_weight_position", c.motion.std_weight_position},
                    {"std_weight_velocity", c.motion.std_weight_velocity},
                    {"std_weight_measurement", c.motion.std_weight_measurement},
                    {"process_noise_scale", c.motion.process_noise_scale},
                    {"measurement_noise_scale", c.motion.measurement_noise_scale},
                    {"size_smoothing", c.motion.size_smoothing}};
  root["appearance"] = {{"enabled", c.appearance.enabled},
                        {"gallery_budget", c.appearance.gallery_budget},
                        {"h_bins", c.appearance.h_bins},
                        {"s_bins", c.appearance.s_bins},
                        {"v_bins", c.appearance.v_bins}};
  root["association"] = {{"lambda", c.association.lambda},
                         {"cos_gate", c.association.cos_gate},
                         {"maha_gate", c.association.maha_gate},
                         {"iou_gate", c.association.iou_gate}};
  root["head"] = {{"enabled", c.head.enabled},
                  {"patch_size", c.head.patch_size},
                  {"search_window", c.head.search_window},
                  {"search_stride", c.head.search_stride},
                  {"recovery_stride", c.head.recovery_stride},
                  {"bins", c.head.bins},
                  {"contrast_gain", c.head.contrast_gain},
                  {"lost_threshold", c.head.lost_threshold},
                  {"refresh_period_s", c.head.refresh_period_s},
                  {"body_dilation", c.head.body_dilation},
                  {"follow_body", c.head.follow_body},
                  {"refine", c.head.refine}};
  root["behavior"] = {{"threshold_px", c.behavior.threshold_px},
                      {"window_s", c.behavior.window_s},
                      {"threshold_body_lengths_per_s", c.behavior.threshold_body_lengths_per_s},
                      {"use_displacement", c.behavior.use_displacement},
                      {"speed_halfwindow_s", c.behavior.speed_halfwindow_s},
                      {"max_gap_s", c.behavior.max_gap_s},
                      {"margin_px", c.behavior.margin_px},
                      {"min_dwell_s", c.behavior.min_dwell_s},
                      {"min_gap_s", c.behavior.min_gap_s}};
  root["metrics"] = {{"match_radius", c.metrics.match_radius},
                     {"skip_frames", c.metrics.skip_frames}};
  json paths = json::object();
  if (!c.paths.detections.empty()) paths["detections"] = c.paths.detections;
  if (!c.paths.frames.empty()) paths["frames"] = c.paths.frames;
  if (!c.paths.out.empty()) paths["out"] = c.paths.out;
  if (!c.paths.gt.empty()) paths["gt"] = c.paths.gt;
  if (!c.paths.gt_behavior.empty()) paths["gt_behavior"] = c.paths.gt_behavior;
  if (!paths.empty()) root["paths"] = paths;
  return root.dump(2) + "\n";
}

void save_config(const std::filesystem::path& path, const PipelineConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << config_to_json(cfg);
}

}  // namespace flocktrack
