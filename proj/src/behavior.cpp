// SPDX-License-Identifier: Apache-2.0
#include "flocktrack/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "flocktrack/error.hpp"

namespace flocktrack {

namespace {

struct Segment {
  int first_frame = 0;
  std::vector<Point> points;  // one per consecutive frame
};

std::vector<Segment> contiguous_segments(std::span<const TrajectoryPoint> traj,
                                         int max_gap_frames) {
  std::vector<Segment> segs;
  for (const TrajectoryPoint& tp : traj) {
    if (!segs.empty()) {
      Segment& s = segs.back();
      const int last = s.first_frame + static_cast<int>(s.points.size()) - 1;
      const int gap = tp.frame - last;
      if (gap <= 0) continue;  // duplicate frame
      if (gap - 1 <= max_gap_frames) {
        const Point a = s.points.back();
        for (int k = 1; k < gap; ++k) {
          const double t = static_cast<double>(k) / gap;
          s.points.push_back({a.x + t * (tp.p.x - a.x), a.y + t * (tp.p.y - a.y)});
        }
        s.points.push_back(tp.p);
        continue;
      }
    }
    segs.push_back({tp.frame, {tp.p}});
  }
  return segs;
}

Point nearest_box_point(const BoundingBox& box, Point target) {
  return {std::clamp(target.x, box.left(), box.right()),
          std::clamp(target.y, box.top(), box.bottom())};
}

bool in_dilated(Point p, const Polygon& poly, double margin) {
  if (poly.empty()) return false;
  return point_in_polygon(p, poly) || distance_to_boundary(p, poly) <= margin;
}

int frames_of(double seconds, double fps) {
  return static_cast<int>(std::lround(seconds * fps));
}

}  // namespace

std::string_view to_string(BehaviorKind k) {
  switch (k) {
    case BehaviorKind::kWalking: return "walking";
    case BehaviorKind::kEating: return "eating";
    case BehaviorKind::kDrinking: return "drinking";
  }
  return "unknown";
}

std::optional<BehaviorKind> parse_behavior_kind(std::string_view s) {
  if (s == "walking" || s == "walk") return BehaviorKind::kWalking;
  if (s == "eating" || s == "eat") return BehaviorKind::kEating;
  if (s == "drinking" || s == "drink") return BehaviorKind::kDrinking;
  return std::nullopt;
}

std::vector<BehaviorEvent> detect_walking(std::span<const TrajectoryPoint> trajectory,
                                          int track_id, double fps,
                                          const BehaviorConfig& cfg,
                                          double body_height) {
  const int window = std::max(1, frames_of(cfg.window_s, fps));
  const int half = std::max(1, frames_of(cfg.speed_halfwindow_s, fps));
  double threshold = cfg.threshold_px;
  if (cfg.threshold_body_lengths_per_s > 0.0 && body_height > 0.0) {
    threshold = cfg.threshold_body_lengths_per_s * body_height * cfg.window_s;
  }
  const double rate = threshold / window;

  std::vector<BehaviorEvent> events;
  for (const Segment& seg :
       contiguous_segments(trajectory, frames_of(cfg.max_gap_s, fps))) {
    const auto& q = seg.points;
    const int n = static_cast<int>(q.size());
    std::vector<double> cumulative(n, 0.0);
    for (int k = 1; k < n; ++k) cumulative[k] = cumulative[k - 1] + distance(q[k], q[k - 1]);

    std::vector<char> trigger(n, 0), moving(n, 0);
    for (int k = 0; k < n; ++k) {
      const int back = std::max(0, k - window);
      const double amount = cfg.use_displacement ? distance(q[k], q[back])
                                                 : cumulative[k] - cumulative[back];
      trigger[k] = amount > threshold;
      const int lo = std::max(0, k - half), hi = std::min(n - 1, k + half);
      moving[k] = hi > lo && distance(q[hi], q[lo]) / (hi - lo) > rate;
    }

    // A moving run counts as walking once the trailing-window rule fires
    // somewhere inside it.
    int k = 0;
    while (k < n) {
      if (!moving[k]) {
        ++k;
        continue;
      }
      int e = k;
      bool fired = false;
      while (e < n && moving[e]) fired |= trigger[e++] != 0;
      if (fired) {
        events.push_back({track_id, BehaviorKind::kWalking, seg.first_frame + k,
                          seg.first_frame + e - 1, false});
      }
      k = e;
    }
  }
  return merge_events(std::move(events), fps, cfg.min_gap_s);
}

std::vector<BehaviorEvent> detect_feeding(std::span<const ProximitySample> samples,
                                          int track_id, const PenLayout& layout,
                                          double fps, const BehaviorConfig& cfg) {
  if (layout.feeder.empty() && layout.drinker.empty()) {
    throw Error(ErrorCode::kLayoutMissing, "feeder and drinker polygons are missing");
  }
  const Point feeder_c = layout.feeder.empty() ? Point{} : polygon_centroid(layout.feeder);
  const Point drinker_c = layout.drinker.empty() ? Point{} : polygon_centroid(layout.drinker);

  struct Label {
    int frame;
    std::optional<BehaviorKind> kind;
    bool low_conf;
  };
  std::vector<Label> labels;
  labels.reserve(samples.size());
  for (const ProximitySample& s : samples) {
    if (!s.head && !s.body) continue;
    const bool fallback = !s.head;
    const Point pf = s.head ? *s.head : nearest_box_point(*s.body, feeder_c);
    const Point pd = s.head ? *s.head : nearest_box_point(*s.body, drinker_c);
    const bool eat = in_dilated(pf, layout.feeder, cfg.margin_px);
    const bool drink = in_dilated(pd, layout.drinker, cfg.margin_px);
    std::optional<BehaviorKind> kind;
    if (eat && drink) {
      kind = distance(pd, drinker_c) < distance(pf, feeder_c) ? BehaviorKind::kDrinking
                                                               : BehaviorKind::kEating;
    } else if (eat) {
      kind = BehaviorKind::kEating;
    } else if (drink) {
      kind = BehaviorKind::kDrinking;
    }
    labels.push_back({s.frame, kind, fallback});
  }

  const int min_dwell = frames_of(cfg.min_dwell_s, fps);
  std::vector<BehaviorEvent> events;
  std::size_t i = 0;
  while (i < labels.size()) {
    if (!labels[i].kind) {
      ++i;
      continue;
    }
    std::size_t j = i;
    bool low_conf = false;
    while (j < labels.size() && labels[j].kind == labels[i].kind &&
           labels[j].frame - labels[i].frame == static_cast<int>(j - i)) {
      low_conf |= labels[j].low_conf;
      ++j;
    }
    const int length = static_cast<int>(j - i);
    if (length >= min_dwell) {
      events.push_back({track_id, *labels[i].kind, labels[i].frame,
                        labels[j - 1].frame, low_conf});
    }
    i = j;
  }
  return merge_events(std::move(events), fps, cfg.min_gap_s);
}

std::vector<BehaviorEvent> merge_events(std::vector<BehaviorEvent> events,
                                        double fps, double min_gap_s) {
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    return std::tie(a.track_id, a.kind, a.start, a.end) <
           std::tie(b.track_id, b.kind, b.start, b.end);
  });
  const double min_gap_frames = min_gap_s * fps;
  std::vector<BehaviorEvent> out;
  for (const BehaviorEvent& e : events) {
    if (!out.empty()) {
      BehaviorEvent& last = out.back();
      if (last.track_id == e.track_id && last.kind == e.kind) {
        const int gap = e.start - last.end - 1;
        if (gap < min_gap_frames) {
          last.end = std::max(last.end, e.end);
          last.low_confidence = last.low_confidence || e.low_confidence;
          continue;
        }
      }
    }
    out.push_back(e);
  }
  return out;
}

BehaviorSummary summarize(std::span<const BehaviorEvent> events, double fps) {
  BehaviorSummary summary;
  for (const BehaviorEvent& e : events) {
    BehaviorStats& s = summary[{e.track_id, e.kind}];
    s.count += 1;
    s.total_s += (e.end - e.start + 1) / fps;
  }
  for (auto& [key, s] : summary) s.mean_s = s.total_s / s.count;
  return summary;
}

}  // namespace flocktrack
