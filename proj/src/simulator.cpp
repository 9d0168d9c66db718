// SPDX-License-Identifier: Apache-2.0
#include "flocktrack/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "flocktrack/color.hpp"
#include "flocktrack/error.hpp"
#include "flocktrack/rng.hpp"

namespace flocktrack {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInsertSpeed = 60.0;       // px/s
constexpr double kInsertLength = 80.0;      // approach point to dock, px
constexpr double kDockDepth = 8.0;          // head depth inside the fixture
constexpr double kApproachClearance = 40.0;  // for the fixture being visited
constexpr double kFpClearance = 100.0;
constexpr Rgb kBackground{128, 128, 128};
constexpr Rgb kBodyColor{235, 228, 210};
constexpr Rgb kFeederColor{150, 115, 70};
constexpr Rgb kDrinkerColor{95, 125, 105};

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

// Rotates at most max_step toward target; lands on it exactly when close.
double turn_toward(double heading, double target, double max_step) {
  const double d = wrap_angle(target - heading);
  if (std::abs(d) <= max_step) return target;
  return wrap_angle(heading + (d > 0.0 ? max_step : -max_step));
}

double outside_distance(Point p, const Polygon& poly) {
  if (poly.empty()) return INFINITY;
  return point_in_polygon(p, poly) ? 0.0 : distance_to_boundary(p, poly);
}

double depth_inside(Point p, const Polygon& poly) {
  const double d = distance_to_boundary(p, poly);
  return point_in_polygon(p, poly) ? d : -d;
}

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const double d1 = cross(c, d, a), d2 = cross(c, d, b);
  const double d3 = cross(a, b, c), d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  auto on_segment = [](Point p, Point q, Point r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
           std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
  };
  return (d1 == 0 && on_segment(c, d, a)) || (d2 == 0 && on_segment(c, d, b)) ||
         (d3 == 0 && on_segment(a, b, c)) || (d4 == 0 && on_segment(a, b, d));
}

bool polygons_overlap(const Polygon& a, const Polygon& b) {
  if (a.empty() || b.empty()) return false;
  for (const Point& p : a) {
    if (point_in_polygon(p, b)) return true;
  }
  for (const Point& p : b) {
    if (point_in_polygon(p, a)) return true;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (segments_intersect(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()])) {
        return true;
      }
    }
  }
  return false;
}

Point head_of(Point c, double heading, double offset) {
  return {c.x + offset * std::cos(heading), c.y + offset * std::sin(heading)};
}

enum class Phase { kRest, kWalk, kApproach, kTurnIn, kInsert, kDwell, kTurnOut };
enum class Fixture { kFeeder = 0, kDrinker = 1 };

struct Slot {
  Fixture fixture = Fixture::kFeeder;
  Point approach;
  Point dock;
  double dock_heading = 0.0;
  int owner = -1;
};

struct Bird {
  Point pos;
  double heading = 0.0;
  Phase phase = Phase::kRest;
  int timer = 0;
  double speed = 0.0;
  double target_heading = 0.0;
  double path_left = 0.0;
  int blocked = 0;
  int slot = -1;
  bool release_after_walk = false;
};

class FlockModel {
 public:
  FlockModel(const SimConfig& cfg, Rng& rng)
      : cfg_(cfg), rng_(rng), fps_(cfg.video.fps),
        max_turn_(cfg.turn_rate_deg * kPi / 180.0 / cfg.video.fps),
        interior_{cfg.layout.pen_bounds.x0 + cfg.body_half_w + 1.0,
                  cfg.layout.pen_bounds.y0 + cfg.body_half_h + 1.0,
                  cfg.layout.pen_bounds.x1 - cfg.body_half_w - 1.0,
                  cfg.layout.pen_bounds.y1 - cfg.body_half_h - 1.0} {
    build_slots(Fixture::kFeeder);
    build_slots(Fixture::kDrinker);
    place_birds();
  }

  const std::vector<Bird>& birds() const { return birds_; }

  void step() {
    for (std::size_t i = 0; i < birds_.size(); ++i) step_bird(static_cast<int>(i));
  }

 private:
  const Polygon& polygon(Fixture f) const {
    return f == Fixture::kFeeder ? cfg_.layout.feeder : cfg_.layout.drinker;
  }

  void build_slots(Fixture f) {
    const Polygon& poly = polygon(f);
    if (poly.empty()) return;
    const Point c = polygon_centroid(poly);
    const Rect& pen = cfg_.layout.pen_bounds;
    Point n{0.5 * (pen.x0 + pen.x1) - c.x, 0.5 * (pen.y0 + pen.y1) - c.y};
    const double len = std::hypot(n.x, n.y);
    if (len == 0.0) return;
    n = {n.x / len, n.y / len};
    const Point t{-n.y, n.x};
    double lo = INFINITY, hi = -INFINITY;
    for (const Point& v : poly) {
      const double s = (v.x - c.x) * t.x + (v.y - c.y) * t.y;
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    std::vector<double> offsets = {0.5 * (lo + hi)};
    if (f == Fixture::kFeeder && 0.5 * (hi - lo) >= cfg_.min_separation) {
      offsets = {lo + 0.25 * (hi - lo), lo + 0.75 * (hi - lo)};
    }
    for (double o : offsets) {
      const Point base{c.x + o * t.x, c.y + o * t.y};
      auto head_at = [&](double s) {
        return Point{base.x + (s - cfg_.head_offset) * n.x,
                     base.y + (s - cfg_.head_offset) * n.y};
      };
      double a = cfg_.head_offset, b = cfg_.head_offset + 2000.0;
      if (depth_inside(head_at(a), poly) < kDockDepth) continue;
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (a + b);
        (depth_inside(head_at(m), poly) >= kDockDepth ? a : b) = m;
      }
      Slot slot;
      slot.fixture = f;
      slot.dock = {base.x + a * n.x, base.y + a * n.y};
      slot.approach = {slot.dock.x + kInsertLength * n.x, slot.dock.y + kInsertLength * n.y};
      slot.dock_heading = std::atan2(-n.y, -n.x);
      if (interior_.contains(slot.dock) && interior_.contains(slot.approach)) {
        slots_.push_back(slot);
      }
    }
  }

  void place_birds() {
    for (int i = 0; i < cfg_.n_birds; ++i) {
      bool placed = false;
      for (int attempt = 0; attempt < 20000 && !placed; ++attempt) {
        const Point p{rng_.uniform(interior_.x0, interior_.x1),
                      rng_.uniform(interior_.y0, interior_.y1)};
        bool ok = outside_distance(p, cfg_.layout.feeder) >= cfg_.keep_out + 10.0 &&
                  outside_distance(p, cfg_.layout.drinker) >= cfg_.keep_out + 10.0;
        for (const Bird& b : birds_) ok = ok && distance(p, b.pos) >= cfg_.min_separation;
        if (!ok) continue;
        Bird b;
        b.pos = p;
        b.heading = rng_.uniform(-kPi, kPi);
        b.phase = Phase::kRest;
        b.timer = frames(rng_.uniform(0.5, 3.0));
        birds_.push_back(b);
        placed = true;
      }
      if (!placed) throw Error(ErrorCode::kConfig, "pen too small for the requested number of birds");
    }
  }

  int frames(double seconds) const {
    return std::max(1, static_cast<int>(std::lround(seconds * fps_)));
  }

  bool visiting(const Bird& b, Fixture f) const {
    return b.slot >= 0 && slots_[b.slot].fixture == f;
  }

  bool allowed(int i, Point p) const {
    const Bird& me = birds_[i];
    if (!interior_.contains(p)) return false;
    for (std::size_t j = 0; j < birds_.size(); ++j) {
      if (static_cast<int>(j) != i && distance(p, birds_[j].pos) < cfg_.min_separation) {
        return false;
      }
    }
    for (Fixture f : {Fixture::kFeeder, Fixture::kDrinker}) {
      const Polygon& poly = polygon(f);
      if (poly.empty()) continue;
      double clearance = cfg_.keep_out;
      if (visiting(me, f)) {
        if (me.phase != Phase::kApproach && me.phase != Phase::kWalk &&
            me.phase != Phase::kRest) {
          continue;
        }
        clearance = kApproachClearance;
      }
      const double d_new = outside_distance(p, poly);
      if (d_new < clearance && d_new < outside_distance(me.pos, poly)) return false;
    }
    return true;
  }

  void start_walk(Bird& b, double heading_spread) {
    b.phase = Phase::kWalk;
    b.speed = rng_.uniform(cfg_.speed_min, cfg_.speed_max);
    b.target_heading = wrap_angle(b.heading + rng_.uniform(-heading_spread, heading_spread));
    b.path_left = rng_.uniform(150.0, 300.0);
    b.blocked = 0;
  }

  void start_rest(Bird& b, double lo_s, double hi_s) {
    b.phase = Phase::kRest;
    b.timer = frames(rng_.uniform(lo_s, hi_s));
    b.blocked = 0;
  }

  void release_slot(Bird& b) {
    if (b.slot >= 0) slots_[b.slot].owner = -1;
    b.slot = -1;
    b.release_after_walk = false;
  }

  bool try_start_visit(int i) {
    Bird& b = birds_[i];
    std::vector<int> free;
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      if (slots_[s].owner < 0) free.push_back(static_cast<int>(s));
    }
    if (free.empty()) return false;
    const int pick = free[std::min<std::size_t>(
        free.size() - 1, static_cast<std::size_t>(rng_.uniform() * free.size()))];
    const Slot& slot = slots_[pick];
    const double len = distance(b.pos, slot.approach);
    const int samples = std::max(1, static_cast<int>(len / 5.0));
    for (int k = 0; k <= samples; ++k) {
      const double t = static_cast<double>(k) / samples;
      const Point p{b.pos.x + t * (slot.approach.x - b.pos.x),
                    b.pos.y + t * (slot.approach.y - b.pos.y)};
      for (Fixture f : {Fixture::kFeeder, Fixture::kDrinker}) {
        const double need = f == slot.fixture ? kApproachClearance : cfg_.keep_out;
        if (outside_distance(p, polygon(f)) < need) return false;
      }
    }
    slots_[pick].owner = i;
    b.slot = pick;
    b.phase = Phase::kApproach;
    b.blocked = 0;
    return true;
  }

  void end_walk(int i) {
    Bird& b = birds_[i];
    if (b.release_after_walk) release_slot(b);
    if (rng_.bernoulli(cfg_.visit_probability) && try_start_visit(i)) return;
    if (rng_.bernoulli(0.55)) {
      start_rest(b, 0.5, 1.2);
    } else {
      start_rest(b, 4.0, 8.0);
    }
  }

  // Moves toward `target` by at most `step`; returns true on arrival.
  bool move_toward(int i, Point target, double step, bool& moved) {
    Bird& b = birds_[i];
    const double d = distance(b.pos, target);
    moved = false;
    if (d <= step) {
      if (!allowed(i, target)) return false;
      b.pos = target;
      moved = true;
      return true;
    }
    const Point p{b.pos.x + step * (target.x - b.pos.x) / d,
                  b.pos.y + step * (target.y - b.pos.y) / d};
    if (!allowed(i, p)) return false;
    b.pos = p;
    moved = true;
    return false;
  }

  void step_bird(int i) {
    Bird& b = birds_[i];
    const double dt = 1.0 / fps_;
    switch (b.phase) {
      case Phase::kRest:
        if (--b.timer <= 0) start_walk(b, kPi);
        break;
      case Phase::kWalk: {
        if (rng_.bernoulli(0.02)) {
          b.target_heading = wrap_angle(b.heading + rng_.uniform(-kPi / 3.0, kPi / 3.0));
        }
        b.heading = turn_toward(b.heading, b.target_heading, max_turn_);
        const double step = b.speed * dt;
        const Point p{b.pos.x + step * std::cos(b.heading), b.pos.y + step * std::sin(b.heading)};
        if (allowed(i, p)) {
          b.pos = p;
          b.path_left -= step;
          b.blocked = 0;
          if (b.path_left <= 0.0) end_walk(i);
        } else {
          if (b.blocked % std::max(1, frames(0.25)) == 0) {
            b.target_heading = wrap_angle(b.heading + kPi + rng_.uniform(-kPi / 2.0, kPi / 2.0));
          }
          if (++b.blocked > frames(1.0)) {
            if (b.release_after_walk) release_slot(b);
            start_rest(b, 4.0, 8.0);
          }
        }
        break;
      }
      case Phase::kApproach: {
        const Slot& slot = slots_[b.slot];
        const double desired = std::atan2(slot.approach.y - b.pos.y, slot.approach.x - b.pos.x);
        if (distance(b.pos, slot.approach) > 0.0) {
          b.heading = turn_toward(b.heading, desired, max_turn_);
        }
        if (std::abs(wrap_angle(desired - b.heading)) >= kPi / 3.0) break;
        bool moved = false;
        const bool arrived = move_toward(i, slot.approach, b.speed * dt, moved);
        if (arrived) {
          b.phase = Phase::kTurnIn;
        } else if (!moved && ++b.blocked > frames(1.0)) {
          release_slot(b);
          start_rest(b, 4.0, 8.0);
        } else if (moved) {
          b.blocked = 0;
        }
        break;
      }
      case Phase::kTurnIn: {
        const Slot& slot = slots_[b.slot];
        b.heading = turn_toward(b.heading, slot.dock_heading, max_turn_);
        if (b.heading == slot.dock_heading) b.phase = Phase::kInsert;
        break;
      }
      case Phase::kInsert: {
        bool moved = false;
        if (move_toward(i, slots_[b.slot].dock, kInsertSpeed * dt, moved)) {
          b.phase = Phase::kDwell;
          b.timer = frames(rng_.uniform(cfg_.dwell_min_s, cfg_.dwell_max_s));
        }
        break;
      }
      case Phase::kDwell:
        if (--b.timer <= 0) {
          b.phase = Phase::kTurnOut;
          b.target_heading = wrap_angle(slots_[b.slot].dock_heading + kPi);
        }
        break;
      case Phase::kTurnOut:
        b.heading = turn_toward(b.heading, b.target_heading, max_turn_);
        if (b.heading == b.target_heading) {
          start_walk(b, 0.0);
          b.release_after_walk = true;
        }
        break;
    }
  }

  const SimConfig& cfg_;
  Rng& rng_;
  double fps_;
  double max_turn_;
  Rect interior_;
  std::vector<Slot> slots_;
  std::vector<Bird> birds_;
};

bool in_span(const std::vector<FrameSpan>& spans, int bird, int frame) {
  for (const FrameSpan& s : spans) {
    if (s.bird == bird && frame >= s.start && frame <= s.end) return true;
  }
  return false;
}

std::vector<BehaviorEvent> walking_truth(const SimOutput& out, int bird) {
  const SimConfig& cfg = out.config;
  const int n = out.frame_count();
  struct Run {
    int start, end;
    double path;
  };
  std::vector<Run> runs;
  for (int f = 1; f < n; ++f) {
    const double step = distance(out.states[f][bird].center, out.states[f - 1][bird].center);
    if (step <= 0.0) continue;
    if (!runs.empty() && runs.back().end == f - 1) {
      runs.back().end = f;
      runs.back().path += step;
    } else {
      runs.push_back({f, f, step});
    }
  }
  // Group runs across short pauses, then keep groups that cover real ground.
  const double gap_frames = cfg.merge_gap_s * cfg.video.fps;
  std::vector<BehaviorEvent> events;
  std::size_t i = 0;
  while (i < runs.size()) {
    Run g = runs[i++];
    while (i < runs.size() && runs[i].start - g.end - 1 < gap_frames) {
      g.end = runs[i].end;
      g.path += runs[i].path;
      ++i;
    }
    if (g.path > cfg.walk_threshold_px) {
      events.push_back({bird + 1, BehaviorKind::kWalking, g.start, g.end, false});
    }
  }
  return events;
}

std::vector<BehaviorEvent> fixture_truth(const SimOutput& out, int bird,
                                         const Polygon& poly, BehaviorKind kind) {
  std::vector<BehaviorEvent> events;
  if (poly.empty()) return events;
  for (int f = 0; f < out.frame_count(); ++f) {
    if (!point_in_polygon(out.states[f][bird].head, poly)) continue;
    if (!events.empty() && events.back().end == f - 1) {
      events.back().end = f;
    } else {
      events.push_back({bird + 1, kind, f, f, false});
    }
  }
  return events;
}

void corrupt(SimOutput& out) {
  const SimConfig& cfg = out.config;
  const CorruptionConfig& cc = cfg.corruption;
  Rng rng(cfg.seed ^ kCorruptionSeedSalt);
  const int n = cfg.n_birds;
  const double bw = 2.0 * cfg.body_half_w, bh = 2.0 * cfg.body_half_h;
  const double hd = 2.0 * cfg.head_radius;
  std::vector<int> label(n);
  for (int b = 0; b < n; ++b) label[b] = b + 1;
  std::vector<int> last_label(n, 0);
  int next_fp_id = 1000;
  InjectedCounts& inj = out.injected;
  const Rect& pen = cfg.layout.pen_bounds;

  for (int f = 0; f < out.frame_count(); ++f) {
    for (const SwapEvent& s : cc.swaps) {
      if (s.frame == f) std::swap(label[s.a - 1], label[s.b - 1]);
    }
    for (int b = 0; b < n; ++b) {
      const BirdState& st = out.states[f][b];
      inj.objects += 1;
      if (!st.visible) {
        inj.misses += 1;
        continue;
      }
      if (f > 0 && cc.miss_rate > 0.0 && rng.bernoulli(cc.miss_rate)) {
        inj.misses += 1;
        continue;
      }
      double jx = 0.0, jy = 0.0;
      if (cc.jitter_sigma > 0.0) {
        jx = cc.jitter_sigma * rng.truncated_normal(4.0);
        jy = cc.jitter_sigma * rng.truncated_normal(4.0);
      }
      const BoundingBox box{st.center.x + jx, st.center.y + jy, bw, bh};
      Detection det{f, box, 1.0, std::nullopt};
      if (f == 0) det.head_init = BoundingBox{st.head.x, st.head.y, hd, hd};
      out.detections.push_back(det);
      out.hypotheses.push_back({f, label[b], box, std::nullopt});
      inj.matches += 1;
      inj.jitter_sum += std::hypot(box.cx - st.center.x, box.cy - st.center.y);
      if (last_label[b] != 0 && last_label[b] != label[b]) inj.mismatches += 1;
      last_label[b] = label[b];
    }
    if (cc.fp_rate > 0.0 && rng.bernoulli(cc.fp_rate)) {
      for (int attempt = 0; attempt < 200; ++attempt) {
        const Point p{rng.uniform(pen.x0 + 0.5 * bw, pen.x1 - 0.5 * bw),
                      rng.uniform(pen.y0 + 0.5 * bh, pen.y1 - 0.5 * bh)};
        bool clear = true;
        for (const BirdState& st : out.states[f]) {
          clear = clear && distance(p, st.center) >= kFpClearance;
        }
        if (!clear) continue;
        const BoundingBox box{p.x, p.y, bw, bh};
        out.detections.push_back({f, box, 0.5, std::nullopt});
        out.hypotheses.push_back({f, next_fp_id++, box, std::nullopt});
        inj.false_positives += 1;
        break;
      }
    }
  }
}

void fill_polygon(RgbImage& img, const Polygon& poly, Rgb color) {
  if (poly.empty()) return;
  double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
  for (const Point& p : poly) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  for (int y = std::max(0, static_cast<int>(std::floor(y0)));
       y <= std::min(img.height() - 1, static_cast<int>(std::ceil(y1))); ++y) {
    for (int x = std::max(0, static_cast<int>(std::floor(x0)));
         x <= std::min(img.width() - 1, static_cast<int>(std::ceil(x1))); ++x) {
      if (point_in_polygon({static_cast<double>(x), static_cast<double>(y)}, poly)) {
        img.set(x, y, color);
      }
    }
  }
}

}  // namespace

PenLayout default_layout(const VideoMeta& video) {
  const double w = video.width, h = video.height;
  PenLayout layout;
  layout.pen_bounds = {0.0, 0.0, w, h};
  // Trough along the top wall, centered.
  const double fx0 = 0.5 * w - 150.0, fx1 = 0.5 * w + 150.0;
  layout.feeder = {{fx0, 0.0}, {fx1, 0.0}, {fx1, 50.0}, {fx0, 50.0}};
  // Octagonal drinker near the bottom-right corner.
  const Point c{w - 100.0, h - 100.0};
  for (int k = 0; k < 8; ++k) {
    const double a = (22.5 + 45.0 * k) * kPi / 180.0;
    layout.drinker.push_back({c.x + 55.0 * std::cos(a), c.y + 55.0 * std::sin(a)});
  }
  return layout;
}

void SimConfig::validate() const {
  if (n_birds <= 0) throw Error(ErrorCode::kConfig, "n_birds must be positive");
  if (!video.valid()) throw Error(ErrorCode::kConfig, "invalid video metadata");
  if (!(clip_s > 0.0)) throw Error(ErrorCode::kConfig, "clip_s must be positive");
  const CorruptionConfig& c = corruption;
  for (double r : {c.miss_rate, c.fp_rate}) {
    if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorCode::kConfig, "rates must lie in [0, 1]");
  }
  if (!(c.jitter_sigma >= 0.0)) throw Error(ErrorCode::kConfig, "jitter_sigma must be >= 0");
  if (!(speed_min > 0.0 && speed_max >= speed_min)) {
    throw Error(ErrorCode::kConfig, "invalid speed range");
  }
  if (!(dwell_min_s > 0.0 && dwell_max_s >= dwell_min_s)) {
    throw Error(ErrorCode::kConfig, "invalid dwell range");
  }
  for (const SwapEvent& s : c.swaps) {
    if (s.a < 1 || s.a > n_birds || s.b < 1 || s.b > n_birds || s.a == s.b) {
      throw Error(ErrorCode::kConfig, "swap references an unknown bird");
    }
  }
  for (const auto* spans : {&c.occlusions, &c.head_occlusions}) {
    for (const FrameSpan& s : *spans) {
      if (s.bird < 1 || s.bird > n_birds || s.end < s.start) {
        throw Error(ErrorCode::kConfig, "invalid occlusion span");
      }
    }
  }
  if (!layout.empty()) {
    layout.validate();
    if (polygons_overlap(layout.feeder, layout.drinker)) {
      throw Error(ErrorCode::kConfig, "feeder and drinker polygons overlap");
    }
  }
}

int SimConfig::frame_count() const {
  return static_cast<int>(std::lround(clip_s * video.fps));
}

double head_hue(int index, int n_birds) {
  if (n_birds <= 1) return 200.0;
  return 200.0 + 130.0 * index / (n_birds - 1);
}

SimOutput simulate(const SimConfig& cfg_in) {
  SimOutput out;
  out.config = cfg_in;
  SimConfig& cfg = out.config;
  if (cfg.layout.empty()) {
    const Rect bounds = cfg.layout.pen_bounds;
    cfg.layout = default_layout(cfg.video);
    if (bounds.x1 > bounds.x0) cfg.layout.pen_bounds = bounds;
  }
  cfg.validate();

  Rng rng(cfg.seed);
  FlockModel model(cfg, rng);
  const int n_frames = cfg.frame_count();
  out.states.reserve(n_frames);
  for (int f = 0; f < n_frames; ++f) {
    if (f > 0) model.step();
    std::vector<BirdState> row;
    row.reserve(cfg.n_birds);
    for (int b = 0; b < cfg.n_birds; ++b) {
      const Bird& bird = model.birds()[b];
      BirdState s;
      s.center = bird.pos;
      s.heading = bird.heading;
      s.head = head_of(bird.pos, bird.heading, cfg.head_offset);
      s.visible = !in_span(cfg.corruption.occlusions, b + 1, f);
      s.head_visible = !in_span(cfg.corruption.head_occlusions, b + 1, f);
      row.push_back(s);
    }
    out.states.push_back(std::move(row));
  }

  const double bw = 2.0 * cfg.body_half_w, bh = 2.0 * cfg.body_half_h;
  const double hd = 2.0 * cfg.head_radius;
  for (int f = 0; f < n_frames; ++f) {
    for (int b = 0; b < cfg.n_birds; ++b) {
      const BirdState& s = out.states[f][b];
      out.ground_truth.push_back({f, b + 1, {s.center.x, s.center.y, bw, bh},
                                  BoundingBox{s.head.x, s.head.y, hd, hd}});
    }
  }

  std::vector<BehaviorEvent> events;
  for (int b = 0; b < cfg.n_birds; ++b) {
    for (auto& e : walking_truth(out, b)) events.push_back(e);
    for (auto& e : fixture_truth(out, b, cfg.layout.feeder, BehaviorKind::kEating)) {
      events.push_back(e);
    }
    for (auto& e : fixture_truth(out, b, cfg.layout.drinker, BehaviorKind::kDrinking)) {
      events.push_back(e);
    }
  }
  out.behavior = merge_events(std::move(events), cfg.video.fps, cfg.merge_gap_s);

  corrupt(out);
  return out;
}

RgbImage render_background(const SimConfig& cfg) {
  RgbImage img(cfg.video.width, cfg.video.height, kBackground);
  fill_polygon(img, cfg.layout.feeder, kFeederColor);
  fill_polygon(img, cfg.layout.drinker, kDrinkerColor);
  return img;
}

RgbImage render_frame(const SimOutput& sim, int frame, const RgbImage* background) {
  const SimConfig& cfg = sim.config;
  if (frame < 0 || frame >= sim.frame_count()) {
    throw Error(ErrorCode::kInput, "frame index out of range");
  }
  RgbImage img = background ? *background : render_background(cfg);

  const double ax = cfg.body_half_w, ay = cfg.body_half_h, r = cfg.head_radius;
  for (int b = 0; b < cfg.n_birds; ++b) {
    const BirdState& s = sim.states[frame][b];
    if (!s.visible) continue;
    const int x0 = std::max(0, static_cast<int>(std::floor(s.center.x - ax)));
    const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(s.center.x + ax)));
    const int y0 = std::max(0, static_cast<int>(std::floor(s.center.y - ay)));
    const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(s.center.y + ay)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double u = (x - s.center.x) / ax, v = (y - s.center.y) / ay;
        if (u * u + v * v <= 1.0) img.set(x, y, kBodyColor);
      }
    }
  }
  // Heads go on top so that a bird's own body never hides its head.
  for (int b = 0; b < cfg.n_birds; ++b) {
    const BirdState& s = sim.states[frame][b];
    if (!s.visible) continue;
    const double hue = head_hue(b, cfg.n_birds);
    const int x0 = std::max(0, static_cast<int>(std::floor(s.head.x - r)));
    const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(s.head.x + r)));
    const int y0 = std::max(0, static_cast<int>(std::floor(s.head.y - r)));
    const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(s.head.y + r)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double d = std::hypot(x - s.head.x, y - s.head.y);
        if (d > r) continue;
        img.set(x, y, s.head_visible ? hsv_to_rgb({hue, 0.85, 0.95 - 0.35 * d / r})
                                     : kBodyColor);
      }
    }
  }
  return img;
}

}  // namespace flocktrack
