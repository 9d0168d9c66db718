// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Each criterion prints one PASS/FAIL line with the
// measured values; the exit status is nonzero when any criterion fails.
//
//   flocktrack_acceptance [--only SUBSTRING]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.hpp"
#include "flocktrack/assignment.hpp"
#include "flocktrack/behavior.hpp"
#include "flocktrack/head_tracker.hpp"
#include "flocktrack/kalman.hpp"
#include "flocktrack/metrics.hpp"
#include "flocktrack/pipeline.hpp"
#include "flocktrack/simulator.hpp"

namespace fs = std::filesystem;
using namespace flocktrack;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PipelineConfig config_for(const SimOutput& sim) {
  PipelineConfig cfg;
  cfg.video = sim.config.video;
  cfg.layout = sim.config.layout;
  cfg.frame_count = sim.frame_count();
  cfg.metrics.skip_frames = cfg.motion.confirm_hits - 1;
  return cfg;
}

// Frames where birds a and b are far enough apart that a label swap cannot
// be undone by the radius-gated correspondence.
std::vector<int> far_apart_frames(const SimOutput& sim, int a, int b, double min_dist) {
  std::vector<int> out;
  for (int f = 1; f < sim.frame_count(); ++f) {
    if (distance(sim.states[f][a - 1].center, sim.states[f][b - 1].center) > min_dist) {
      out.push_back(f);
    }
  }
  return out;
}

Outcome metric_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_mota = 0.0, worst_motp = 0.0;
  long swaps_total = 0, mismatches_total = 0;
  for (int seed = 1; seed <= 20; ++seed) {
    SimConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.n_birds = 5;
    cfg.clip_s = 60.0;
    cfg.corruption.miss_rate = 0.01 * (1 + seed % 5);
    cfg.corruption.fp_rate = 0.02 * (seed % 4);
    cfg.corruption.jitter_sigma = 0.5 * (seed % 6);
    // Ground truth does not depend on the corruption stream, so swap frames
    // can be picked from an uncorrupted run.
    const SimOutput clean = simulate(cfg);
    std::mt19937 pick(static_cast<unsigned>(seed));
    for (int k = 0; k < 3; ++k) {
      const int a = 1 + (seed + k) % 5;
      const int b = 1 + (seed + k + 2) % 5;
      const std::vector<int> frames = far_apart_frames(clean, a, b, 150.0);
      if (frames.empty()) continue;
      const int f = frames[std::uniform_int_distribution<std::size_t>(0, frames.size() - 1)(pick)];
      cfg.corruption.swaps.push_back({f, a, b});
    }
    swaps_total += static_cast<long>(cfg.corruption.swaps.size());
    const SimOutput sim = simulate(cfg);
    const MotSummary s = evaluate_tracks(sim.ground_truth, sim.hypotheses, 50.0);
    if (!s.mota || !s.motp) return {false, fmt("seed %d: metrics undefined", seed)};
    worst_mota = std::max(worst_mota, std::abs(*s.mota - sim.injected.expected_mota()));
    worst_motp = std::max(worst_motp, std::abs(*s.motp - sim.injected.expected_motp()));
    mismatches_total += s.mismatches;
  }
  const double elapsed = seconds_since(t0);
  const bool pass = worst_mota <= 1e-12 && worst_motp <= 1e-9 && elapsed < 10.0;
  return {pass, fmt("20 seeds, %ld swaps (%ld mismatches): max |dMOTA| %.3g (<= 1e-12), "
                    "max |dMOTP| %.3g (<= 1e-9), %.2f s (< 10 s)",
                    swaps_total, mismatches_total, worst_mota, worst_motp, elapsed)};
}

Outcome noiseless_round_trip() {
  std::string detail;
  bool pass = true;
  for (int birds : {5, 7}) {
    SimConfig sc;
    sc.seed = 11;
    sc.n_birds = birds;
    sc.clip_s = 60.0;
    const SimOutput sim = simulate(sc);
    const PipelineConfig cfg = config_for(sim);
    const SimFrameSource frames(sim);
    const AnalysisBundle bundle = run_pipeline(cfg, sim.detections, &frames);
    const ClipScore score = evaluate(bundle, sim.ground_truth, nullptr, cfg);
    const MotSummary& s = *score.body;
    const bool ok = s.mota && *s.mota == 1.0 && s.motp && *s.motp < 1e-9 && s.mismatches == 0;
    pass = pass && ok;
    detail += fmt("%s%d birds: MOTA %.17g, MOTP %.3g, ID switches %ld", detail.empty() ? "" : "; ",
                  birds, s.mota.value_or(-1.0), s.motp.value_or(-1.0), s.mismatches);
  }
  return {pass, detail};
}

Outcome occlusion_reidentification() {
  int restored = 0;
  std::string failures;
  for (int seed = 1; seed <= 20; ++seed) {
    SimConfig sc;
    sc.seed = static_cast<std::uint64_t>(100 + seed);
    sc.n_birds = 5;
    sc.clip_s = 30.0;
    const int bird = 1 + seed % 5;
    const int start = 450, end = 450 + 2 * 30 - 1;  // 2 s at 30 fps
    sc.corruption.occlusions.push_back({bird, start, end});
    const SimOutput sim = simulate(sc);
    PipelineConfig cfg = config_for(sim);
    cfg.head.enabled = false;  // identity only depends on body association
    const SimFrameSource frames(sim);
    const AnalysisBundle bundle = run_pipeline(cfg, sim.detections, &frames);

    // Detections are exact, so a record belongs to the bird whose
    // ground-truth box it equals.
    std::map<int, BoundingBox> gt_box;
    for (const TrackRecord& r : sim.ground_truth) {
      if (r.track_id == bird) gt_box[r.frame] = r.box;
    }
    auto id_at = [&](int frame) {
      for (const TrackRecord& r : bundle_records(bundle)) {
        if (r.frame == frame && r.box == gt_box[frame]) return r.track_id;
      }
      return -1;
    };
    const int before = id_at(start - 1);
    // Same id on every frame of the second after reappearance.
    bool same = before > 0;
    for (int f = end + 1; f <= end + 30 && same; ++f) same = id_at(f) == before;
    if (same) {
      ++restored;
    } else {
      failures += fmt(" %d", seed);
    }
  }
  return {restored >= 18, fmt("same ID restored in %d/20 seeds (need >= 18)%s%s", restored,
                              failures.empty() ? "" : "; failed seeds:", failures.c_str())};
}

// Exhaustive oracle with the solver's objective: most pairs, then least cost.
std::pair<int, double> brute_force(const CostMatrix& c) {
  const int n = std::max(c.rows(), c.cols());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  int best_pairs = -1;
  double best_cost = 0.0;
  do {
    int pairs = 0;
    double cost = 0.0;
    for (int r = 0; r < c.rows(); ++r) {
      if (perm[r] < c.cols() && c.feasible(r, perm[r])) {
        ++pairs;
        cost += c(r, perm[r]);
      }
    }
    if (pairs > best_pairs || (pairs == best_pairs && cost < best_cost)) {
      best_pairs = pairs;
      best_cost = cost;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best_pairs, best_cost};
}

Outcome assignment_optimality() {
  std::mt19937_64 rng(20240601);
  int agree = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 6);
    const int cols = 1 + static_cast<int>(rng() % 6);
    CostMatrix c(rows, cols);
    const bool gated = trial % 3 == 0;
    for (int r = 0; r < rows; ++r) {
      for (int k = 0; k < cols; ++k) {
        // Integer-valued costs keep every partial sum exact.
        c(r, k) = static_cast<double>(rng() % 1000);
        if (gated && rng() % 4 == 0) c(r, k) = kInfeasible;
      }
    }
    const AssignmentResult res = solve_assignment(c);
    const auto [pairs, cost] = brute_force(c);
    if (static_cast<int>(res.matches.size()) == pairs && total_cost(c, res) == cost) ++agree;
  }
  return {agree == 1000, fmt("%d/1000 matrices (1x1..6x6, a third gated) equal the "
                             "exhaustive minimum", agree)};
}

Outcome kalman_sanity() {
  MotionConfig cfg;
  cfg.measurement_noise_scale = 1e-6;
  const Point p0{200.0, 150.0};
  const Point v{3.5, -1.25};
  KalmanState s = kalman_initiate(p0, 44.0, cfg);
  Point z = p0;
  for (int k = 1; k <= 10; ++k) {
    z = {p0.x + k * v.x, p0.y + k * v.y};
    s = kalman_update(kalman_predict(s, 44.0, cfg), z, 44.0, cfg);
  }
  const double err = std::hypot(s.mean(0) - z.x, s.mean(1) - z.y);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(0.0, 1280.0), h(10.0, 200.0), coin(0.0, 1.0);
  const MotionConfig def;
  KalmanState k = kalman_initiate({640.0, 360.0}, 50.0, def);
  int spd_steps = 0;
  for (int i = 0; i < 10000; ++i) {
    const double height = h(rng);
    k = coin(rng) < 0.5 ? kalman_predict(k, height, def)
                        : kalman_update(k, {pos(rng), pos(rng) * 0.5625}, height, def);
    if (is_spd(k.covariance)) ++spd_steps;
  }
  return {err < 1e-6 && spd_steps == 10000,
          fmt("position error after 10 frames %.3g px (< 1e-6); SPD after %d/10000 random "
              "steps", err, spd_steps)};
}

Outcome head_tracker() {
  // Weight vectors and the two weighted-distance worked examples.
  const double hsv_sum = kHsvWeights[0] + kHsvWeights[1] + kHsvWeights[2];
  const double lab_sum = kLabWeights[0] + kLabWeights[1] + kLabWeights[2];
  const std::vector<double> e0{1.0, 0.0}, e1{0.0, 1.0};
  ChannelHistograms target, cand_h, cand_la;
  for (int c = 0; c < 6; ++c) {
    target[c] = e0;
    cand_h[c] = c == 0 ? e1 : e0;
    cand_la[c] = (c == 3 || c == 4) ? e1 : e0;
  }
  const double ex1 = head_distance(cand_h, target);
  const double ex2 = head_distance(cand_la, target);
  const bool weights_ok = std::abs(hsv_sum - 1.0) <= 1e-15 && std::abs(lab_sum - 1.0) <= 1e-15 &&
                          ex1 == 0.8 && ex2 == 0.8;

  // Accuracy over full 60 s clips.
  double worst_fraction = 1.0;
  for (int seed = 1; seed <= 3; ++seed) {
    SimConfig sc;
    sc.seed = static_cast<std::uint64_t>(seed);
    sc.clip_s = 60.0;
    const SimOutput sim = simulate(sc);
    PipelineConfig cfg = config_for(sim);
    cfg.appearance.enabled = false;
    const SimFrameSource frames(sim);
    const AnalysisBundle bundle = run_pipeline(cfg, sim.detections, &frames);
    std::map<std::pair<int, int>, Point> truth;
    for (const TrackRecord& r : sim.ground_truth) truth[{r.frame, r.track_id}] = r.head->center();
    long ok = 0, total = 0;
    for (const HeadSeries& h : bundle.heads) {
      for (std::size_t i = 0; i < h.frames.size(); ++i) {
        ++total;
        const double e = distance({h.x[i], h.y[i]}, truth.at({h.frames[i], h.id}));
        if (h.status[i] == HeadStatus::kTracked && e <= 10.0) ++ok;
      }
    }
    worst_fraction = std::min(worst_fraction, total ? static_cast<double>(ok) / total : 0.0);
  }

  // Recovery after the head is painted in the body color for 1 s.
  int recovered = 0;
  for (int seed = 1; seed <= 20; ++seed) {
    SimConfig sc;
    sc.seed = static_cast<std::uint64_t>(200 + seed);
    sc.clip_s = 12.0;
    const int bird = 1 + seed % 5;
    const int start = 150, end = 179;
    sc.corruption.head_occlusions.push_back({bird, start, end});
    const SimOutput sim = simulate(sc);
    PipelineConfig cfg = config_for(sim);
    cfg.appearance.enabled = false;
    const SimFrameSource frames(sim);
    const AnalysisBundle bundle = run_pipeline(cfg, sim.detections, &frames);
    // Without identity errors the tracker's ids follow the bird order.
    const auto it = std::find_if(bundle.heads.begin(), bundle.heads.end(),
                                 [&](const HeadSeries& h) { return h.id == bird; });
    if (it == bundle.heads.end()) continue;
    for (std::size_t i = 0; i < it->frames.size(); ++i) {
      const int f = it->frames[i];
      if (f <= end || f > end + 30) continue;
      const Point truth = sim.states[f][bird - 1].head;
      if (it->status[i] == HeadStatus::kTracked && distance({it->x[i], it->y[i]}, truth) <= 10.0) {
        ++recovered;
        break;
      }
    }
  }
  return {weights_ok && worst_fraction >= 0.95 && recovered >= 18,
          fmt("weights sum %.17g / %.17g, examples %.17g / %.17g (0.8); worst clip %.4f of "
              "frames within 10 px (>= 0.95); recovered within 1 s in %d/20 seeds (>= 18)",
              hsv_sum, lab_sum, ex1, ex2, worst_fraction, recovered)};
}

Outcome behavior_events() {
  int tp = 0, insertions = 0, deletions = 0;
  double iou_sum = 0.0;
  std::string per_kind;
  std::map<BehaviorKind, std::array<double, 3>> kind_totals;  // tp, ins+tp, iou
  for (int seed = 1; seed <= 4; ++seed) {
    SimConfig sc;
    sc.seed = static_cast<std::uint64_t>(seed);
    sc.clip_s = 60.0;
    const SimOutput sim = simulate(sc);
    const PipelineConfig cfg = config_for(sim);
    const SimFrameSource frames(sim);
    const AnalysisBundle bundle = run_pipeline(cfg, sim.detections, &frames);
    const ClipScore score = evaluate(bundle, sim.ground_truth, &sim.behavior, cfg);
    for (const auto& [kind, r] : score.behavior) {
      tp += r.true_positives;
      insertions += r.insertions;
      deletions += r.deletions;
      for (double v : r.ious) iou_sum += v;
      auto& t = kind_totals[kind];
      t[0] += r.true_positives;
      t[1] += r.true_positives + r.insertions;
      for (double v : r.ious) t[2] += v;
    }
  }
  for (const auto& [kind, t] : kind_totals) {
    per_kind += fmt(" %s %g events IOU %.3f;", std::string(to_string(kind)).c_str(), t[0],
                    t[0] > 0 ? t[2] / t[0] : 0.0);
  }
  const double recall = tp + deletions ? static_cast<double>(tp) / (tp + deletions) : 1.0;
  const double precision = tp + insertions ? static_cast<double>(tp) / (tp + insertions) : 1.0;
  const double mean_iou = tp ? iou_sum / tp : 0.0;

  // Walk, pause for 2 s, walk again: one event. A 4 s pause splits it; the
  // exact 3 s boundary is checked on merge_events directly, since the speed
  // test blurs the stop and restart by about a frame each.
  auto walk_pause_walk = [](double pause_s) {
    std::vector<TrajectoryPoint> traj;
    double x = 100.0;
    const int walk = 150, pause = static_cast<int>(std::lround(pause_s * 30.0));
    int f = 0;
    for (int i = 0; i < walk; ++i) traj.push_back({f++, {x += 2.0, 300.0}});
    for (int i = 0; i < pause; ++i) traj.push_back({f++, {x, 300.0}});
    for (int i = 0; i < walk; ++i) traj.push_back({f++, {x += 2.0, 300.0}});
    return detect_walking(traj, 1, 30.0).size();
  };
  const std::size_t merged = walk_pause_walk(2.0);
  const std::size_t split = walk_pause_walk(4.0);
  const std::vector<BehaviorEvent> gap_exact =
      merge_events({{1, BehaviorKind::kWalking, 0, 89}, {1, BehaviorKind::kWalking, 180, 269}},
                   30.0);

  const bool pass = recall == 1.0 && precision >= 0.9 && mean_iou >= 0.9 && merged == 1 &&
                    split == 2 && gap_exact.size() == 2;
  return {pass, fmt("4 clips: recall %.4f (= 1), precision %.4f (>= 0.9), mean IOU %.4f "
                    "(>= 0.9) [%s ]; 2 s pause -> %zu event(s), 4 s pause -> %zu, exact 3 s "
                    "gap -> %zu",
                    recall, precision, mean_iou, per_kind.c_str(), merged, split,
                    gap_exact.size())};
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / fmt("flocktrack_accept_%d", static_cast<int>(::getpid()));
  fs::remove_all(dir);
  std::ostringstream out, err;
  auto run = [&](std::vector<std::string> args) {
    std::vector<const char*> argv{"flocktrack"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    return cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  };
  const std::string sim = (dir / "sim").string();
  int rc = run({"simulate", "--seed", "5", "--seconds", "8", "--out", sim,
                "--miss-rate", "0.02", "--jitter", "1.5"});
  const std::string cfg = (dir / "sim" / "config.json").string();
  const std::string a = (dir / "a").string(), b = (dir / "b").string();
  if (rc == 0) rc = run({"track", "--config", cfg, "--out", a});
  if (rc == 0) rc = run({"track", "--config", cfg, "--out", b});
  if (rc != 0) return {false, "CLI failed: " + err.str()};
  auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  const std::string ba = slurp(fs::path(a) / "bundle.json");
  const std::string bb = slurp(fs::path(b) / "bundle.json");
  fs::remove_all(dir);
  return {!ba.empty() && ba == bb,
          fmt("two `track` runs on an 8 s rendered clip: bundles %zu and %zu bytes, %s", ba.size(),
              bb.size(), ba == bb ? "byte-identical" : "DIFFERENT")};
}

}  // namespace

int main(int argc, char** argv) {
  const char* only = argc == 3 && std::strcmp(argv[1], "--only") == 0 ? argv[2] : nullptr;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"metric-exactness", metric_exactness},
      {"noiseless-round-trip", noiseless_round_trip},
      {"occlusion-reid", occlusion_reidentification},
      {"assignment-optimality", assignment_optimality},
      {"kalman-sanity", kalman_sanity},
      {"head-tracker", head_tracker},
      {"behavior-events", behavior_events},
      {"determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    if (only && !std::strstr(name, only)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %-22s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
