// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "flocktrack/error.hpp"
#include "flocktrack/pipeline.hpp"
#include "flocktrack/simulator.hpp"

using namespace flocktrack;

namespace {

PipelineConfig motion_only(const SimOutput& sim) {
  PipelineConfig c;
  c.video = sim.config.video;
  c.frame_count = sim.frame_count();
  c.layout = sim.config.layout;
  c.appearance.enabled = false;
  c.head.enabled = false;
  c.metrics.skip_frames = c.motion.confirm_hits - 1;
  return c;
}

SimOutput clip(std::uint64_t seed, double seconds) {
  SimConfig s;
  s.seed = seed;
  s.clip_s = seconds;
  return simulate(s);
}

}  // namespace

TEST(Pipeline, NoiselessMotionOnlyIsPerfect) {
  const SimOutput sim = clip(4, 20.0);
  const PipelineConfig cfg = motion_only(sim);
  const AnalysisBundle b = run_pipeline(cfg, sim.detections, nullptr);
  EXPECT_EQ(b.tracks.size(), 5u);
  const ClipScore score = evaluate(b, sim.ground_truth, nullptr, cfg);
  EXPECT_EQ(*score.body->mota, 1.0);
  EXPECT_EQ(*score.body->motp, 0.0);
  EXPECT_EQ(score.body->mismatches, 0);
}

TEST(Pipeline, RecordsAreConfirmedAndMatched) {
  const SimOutput sim = clip(8, 10.0);
  const PipelineConfig cfg = motion_only(sim);
  Tracker tracker(cfg);
  std::size_t i = 0;
  for (int f = 0; f < sim.frame_count(); ++f) {
    std::size_t j = i;
    while (j < sim.detections.size() && sim.detections[j].frame == f) ++j;
    tracker.step(f, std::span(sim.detections).subspan(i, j - i), nullptr);
    i = j;
  }
  // A track is first reported on its confirm_hits-th hit.
  for (const TrackRecord& r : tracker.records()) EXPECT_GE(r.frame, cfg.motion.confirm_hits - 1);
  for (const TrackRecord& r : tracker.records()) {
    const bool matched = std::any_of(sim.detections.begin(), sim.detections.end(),
                                     [&](const Detection& d) { return d.frame == r.frame && d.box == r.box; });
    ASSERT_TRUE(matched);
  }
}

TEST(Pipeline, DeterministicWithFrames) {
  const SimOutput sim = clip(3, 4.0);
  PipelineConfig cfg = motion_only(sim);
  cfg.appearance.enabled = true;
  cfg.head.enabled = true;
  const SimFrameSource frames(sim);
  const AnalysisBundle a = run_pipeline(cfg, sim.detections, &frames);
  const AnalysisBundle b = run_pipeline(cfg, sim.detections, &frames);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.heads.size(), 5u);
}

TEST(Pipeline, FramesRequiredWhenAppearanceOn) {
  const SimOutput sim = clip(3, 1.0);
  PipelineConfig cfg = motion_only(sim);
  cfg.appearance.enabled = true;
  try {
    run_pipeline(cfg, sim.detections, nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInput);
  }
}

TEST(Pipeline, ReportListsEveryKind) {
  const SimOutput sim = clip(1, 20.0);
  const PipelineConfig cfg = motion_only(sim);
  const AnalysisBundle b = run_pipeline(cfg, sim.detections, nullptr);
  const ClipScore score = evaluate(b, sim.ground_truth, &sim.behavior, cfg);
  EXPECT_EQ(score.behavior.size(), 3u);
  const std::string text = format_report(score);
  for (const char* word : {"body", "walking", "eating", "drinking"}) {
    EXPECT_NE(text.find(word), std::string::npos) << word;
  }
}
