// SPDX-License-Identifier: Apache-2.0
//
// End-to-end orchestration: per-frame tracking and head tracking, then
// behavior detection and bundle assembly after the clip, then optional
// scoring against ground truth.

#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "flocktrack/appearance.hpp"
#include "flocktrack/bundle.hpp"
#include "flocktrack/config.hpp"
#include "flocktrack/image.hpp"
#include "flocktrack/metrics.hpp"
#include "flocktrack/track.hpp"

namespace flocktrack {

struct SimOutput;

class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual RgbImage frame(int index) const = 0;
};

// frame_%06d.png files in one directory. Missing files throw kInput.
class PngFrameSource final : public FrameSource {
 public:
  explicit PngFrameSource(std::filesystem::path dir);
  RgbImage frame(int index) const override;

 private:
  std::filesystem::path dir_;
};

// Renders simulator frames on demand. `sim` must outlive the source.
class SimFrameSource final : public FrameSource {
 public:
  explicit SimFrameSource(const SimOutput& sim);
  RgbImage frame(int index) const override;

 private:
  const SimOutput& sim_;
  RgbImage background_;
};

// Online multi-object tracker: one call to step() per frame, in order.
class Tracker {
 public:
  explicit Tracker(PipelineConfig cfg,
                   std::unique_ptr<AppearanceExtractor> extractor = nullptr);

  // `image` may be null only when neither appearance nor head tracking is
  // enabled. Emits a record for every confirmed track updated this frame.
  void step(int frame_index, std::span<const Detection> detections,
            const RgbImage* image);

  const std::vector<Track>& tracks() const { return tracks_; }
  const std::vector<TrackRecord>& records() const { return records_; }
  const std::vector<HeadRecord>& head_records() const { return heads_; }

 private:
  PipelineConfig cfg_;
  std::unique_ptr<AppearanceExtractor> extractor_;
  std::vector<Track> tracks_;
  int next_id_ = 1;
  std::vector<TrackRecord> records_;
  std::vector<HeadRecord> heads_;
};

// Walking plus eating / drinking events for every track.
std::vector<BehaviorEvent> detect_behaviors(const PipelineConfig& cfg,
                                            const std::vector<TrackRecord>& records,
                                            const std::vector<HeadRecord>& heads);

using ProgressFn = std::function<void(int frame, int frame_count)>;

// `detections` sorted by frame. `frames` may be null when the config does
// not need imagery. Errors carry the failing frame index.
AnalysisBundle run_pipeline(const PipelineConfig& cfg,
                            std::span<const Detection> detections,
                            const FrameSource* frames,
                            const ProgressFn& progress = nullptr);

// Scores the bundle's body tracks, tracked heads (when the ground truth has
// heads) and, when given, behavior events. Hypothesis track ids are mapped
// to ground-truth ids by majority correspondence before event matching.
ClipScore evaluate(const AnalysisBundle& bundle, std::span<const TrackRecord> gt,
                   const std::vector<BehaviorEvent>* gt_behavior,
                   const PipelineConfig& cfg);

// Plain-text score table.
std::string format_report(const ClipScore& score);

}  // namespace flocktrack
