// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <map>
#include <random>

#include "flocktrack/behavior.hpp"
#include "flocktrack/error.hpp"

using namespace flocktrack;

namespace {

using K = BehaviorKind;

std::vector<TrajectoryPoint> line(int frames, double speed, Point start = {100, 300}) {
  std::vector<TrajectoryPoint> t;
  for (int f = 0; f < frames; ++f) t.push_back({f, {start.x + speed * f, start.y}});
  return t;
}

PenLayout layout() {
  PenLayout l;
  l.pen_bounds = {0, 0, 1280, 720};
  l.feeder = {{500, 0}, {800, 0}, {800, 50}, {500, 50}};
  l.drinker = {{1100, 600}, {1200, 600}, {1200, 700}, {1100, 700}};
  return l;
}

}  // namespace

TEST(Walking, StationaryHasNoEvents) {
  EXPECT_TRUE(detect_walking(line(600, 0.0), 1, 30.0).empty());
}

TEST(Walking, ConstantVelocitySpansClip) {
  const auto ev = detect_walking(line(600, 2.0), 1, 30.0);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].start, 0);
  EXPECT_EQ(ev[0].end, 599);
  EXPECT_EQ(ev[0].kind, K::kWalking);
}

TEST(Walking, SlowDriftBelowThresholdIgnored) {
  // 0.5 px/frame is 45 px per 3 s window, under the 60 px threshold.
  EXPECT_TRUE(detect_walking(line(600, 0.5), 1, 30.0).empty());
}

TEST(Walking, ShortPauseMerged) {
  std::vector<TrajectoryPoint> t;
  double x = 100;
  int f = 0;
  for (int i = 0; i < 150; ++i) t.push_back({f++, {x += 2, 300}});
  for (int i = 0; i < 60; ++i) t.push_back({f++, {x, 300}});
  for (int i = 0; i < 150; ++i) t.push_back({f++, {x += 2, 300}});
  const auto ev = detect_walking(t, 1, 30.0);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_LE(ev[0].start, 2);
  EXPECT_GE(ev[0].end, 357);
}

TEST(Walking, TranslationInvariant) {
  std::mt19937 rng(4);
  std::normal_distribution<double> step(0.0, 2.5);
  std::vector<TrajectoryPoint> t;
  Point p{300, 300};
  for (int f = 0; f < 900; ++f) {
    p.x += step(rng) + (f / 150 % 2 ? 2.0 : 0.0);
    p.y += step(rng);
    t.push_back({f, p});
  }
  auto shifted = t;
  for (auto& q : shifted) q.p = {q.p.x + 1000.0, q.p.y - 250.0};
  EXPECT_EQ(detect_walking(t, 3, 30.0), detect_walking(shifted, 3, 30.0));
}

TEST(Walking, BodyLengthThresholdOverride) {
  BehaviorConfig cfg;
  cfg.threshold_body_lengths_per_s = 1.0;  // 44 px/s with h = 44, 132 px per window
  EXPECT_TRUE(detect_walking(line(600, 1.2), 1, 30.0, cfg, 44.0).empty());
  EXPECT_EQ(detect_walking(line(600, 2.0), 1, 30.0, cfg, 44.0).size(), 1u);
}

TEST(Feeding, NoFixtureContactNoEvents) {
  std::vector<ProximitySample> s;
  for (int f = 0; f < 300; ++f) s.push_back({f, Point{300, 300}, std::nullopt});
  EXPECT_TRUE(detect_feeding(s, 1, layout(), 30.0).empty());
}

TEST(Feeding, HeadInsideFeederFiveSeconds) {
  std::vector<ProximitySample> s;
  for (int f = 0; f < 400; ++f) {
    const bool in = f >= 100 && f < 250;
    s.push_back({f, Point{in ? 650.0 : 650.0, in ? 40.0 : 300.0}, std::nullopt});
  }
  const auto ev = detect_feeding(s, 2, layout(), 30.0);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0], (BehaviorEvent{2, K::kEating, 100, 249, false}));
}

TEST(Feeding, ShortDwellDropped) {
  std::vector<ProximitySample> s;
  for (int f = 0; f < 100; ++f) {
    s.push_back({f, Point{1150.0, f < 20 ? 650.0 : 400.0}, std::nullopt});
  }
  EXPECT_TRUE(detect_feeding(s, 1, layout(), 30.0).empty());
}

TEST(Feeding, OverlapGoesToNearerCentroidAndTieToEating) {
  // Two squares 20 px apart: both 15 px margins cover the gap.
  PenLayout l;
  l.pen_bounds = {0, 0, 400, 400};
  l.feeder = {{100, 100}, {140, 100}, {140, 140}, {100, 140}};   // centroid (120, 120)
  l.drinker = {{160, 100}, {200, 100}, {200, 140}, {160, 140}};  // centroid (180, 120)
  auto kind_at = [&](Point p) {
    std::vector<ProximitySample> s;
    for (int f = 0; f < 60; ++f) s.push_back({f, p, std::nullopt});
    const auto ev = detect_feeding(s, 1, l, 30.0);
    return ev.size() == 1 ? std::optional<K>(ev[0].kind) : std::nullopt;
  };
  EXPECT_EQ(kind_at({150, 120}), K::kEating);  // equidistant
  EXPECT_EQ(kind_at({147, 120}), K::kEating);
  EXPECT_EQ(kind_at({153, 120}), K::kDrinking);
}

TEST(Feeding, LostHeadFallsBackToBodyWithLowConfidence) {
  std::vector<ProximitySample> s;
  for (int f = 0; f < 60; ++f) s.push_back({f, std::nullopt, BoundingBox{650, 70, 60, 44}});
  const auto ev = detect_feeding(s, 1, layout(), 30.0);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].kind, K::kEating);
  EXPECT_TRUE(ev[0].low_confidence);
}

TEST(Feeding, MissingLayoutIsAnError) {
  PenLayout empty;
  try {
    detect_feeding({}, 1, empty, 30.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLayoutMissing);
  }
}

TEST(Merge, BoundaryAndChain) {
  const double fps = 30.0;
  // Gap of exactly 3 s (90 frames strictly between) stays split.
  EXPECT_EQ(merge_events({{1, K::kWalking, 0, 29}, {1, K::kWalking, 120, 149}}, fps).size(), 2u);
  // One frame between merges.
  const auto one = merge_events({{1, K::kWalking, 0, 29}, {1, K::kWalking, 31, 60}}, fps);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].end, 60);
  // Four events with gaps 1 s, 4 s, 2 s: [e1+e2], [e3+e4].
  const auto chain = merge_events({{1, K::kEating, 0, 29},
                                   {1, K::kEating, 60, 89},
                                   {1, K::kEating, 210, 239},
                                   {1, K::kEating, 300, 329}},
                                  fps);
  ASSERT_EQ(chain.size(), 2u);
  EXPECT_EQ(chain[0], (BehaviorEvent{1, K::kEating, 0, 89, false}));
  EXPECT_EQ(chain[1], (BehaviorEvent{1, K::kEating, 210, 329, false}));
  // Different kinds or tracks never merge.
  EXPECT_EQ(merge_events({{1, K::kEating, 0, 29}, {1, K::kDrinking, 30, 59},
                          {2, K::kEating, 30, 59}}, fps).size(), 3u);
}

TEST(Merge, OutputRespectsMinimumSeparation) {
  std::mt19937 rng(8);
  std::vector<BehaviorEvent> ev;
  for (int i = 0; i < 300; ++i) {
    const int s = static_cast<int>(rng() % 5000);
    ev.push_back({1 + static_cast<int>(rng() % 3), static_cast<K>(rng() % 3), s,
                  s + static_cast<int>(rng() % 120)});
  }
  const auto merged = merge_events(ev, 30.0);
  for (std::size_t i = 1; i < merged.size(); ++i) {
    const auto& a = merged[i - 1];
    const auto& b = merged[i];
    if (a.track_id == b.track_id && a.kind == b.kind) {
      ASSERT_GE(b.start - a.end - 1, 90);
    }
  }
}

TEST(Summary, TotalsMatchIndependentAccumulation) {
  EXPECT_TRUE(summarize({}, 30.0).empty());
  const auto one = summarize(std::vector<BehaviorEvent>{{4, K::kEating, 10, 99}}, 30.0);
  EXPECT_EQ(one.at({4, K::kEating}).total_s, 3.0);
  EXPECT_EQ(one.at({4, K::kEating}).count, 1);

  std::mt19937 rng(5);
  std::vector<BehaviorEvent> ev;
  std::map<std::pair<int, K>, std::pair<int, long>> acc;  // count, frames
  for (int i = 0; i < 200; ++i) {
    const int s = static_cast<int>(rng() % 1000), len = 1 + static_cast<int>(rng() % 200);
    const BehaviorEvent e{1 + static_cast<int>(rng() % 4), static_cast<K>(rng() % 3), s, s + len - 1};
    ev.push_back(e);
    acc[{e.track_id, e.kind}].first += 1;
    acc[{e.track_id, e.kind}].second += len;
  }
  const BehaviorSummary sum = summarize(ev, 25.0);
  ASSERT_EQ(sum.size(), acc.size());
  for (const auto& [key, v] : acc) {
    EXPECT_EQ(sum.at(key).count, v.first);
    EXPECT_NEAR(sum.at(key).total_s, v.second / 25.0, 1e-9);
    EXPECT_NEAR(sum.at(key).mean_s, v.second / 25.0 / v.first, 1e-9);
  }
}

TEST(BehaviorKindNames, RoundTripAndAliases) {
  for (K k : {K::kWalking, K::kEating, K::kDrinking}) EXPECT_EQ(parse_behavior_kind(to_string(k)), k);
  EXPECT_EQ(parse_behavior_kind("drink"), K::kDrinking);
  EXPECT_FALSE(parse_behavior_kind("preening"));
}
