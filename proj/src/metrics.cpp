// SPDX-License-Identifier: Apache-2.0
#include "flocktrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "flocktrack/assignment.hpp"
#include "flocktrack/error.hpp"

namespace flocktrack {

FrameResult correspond_frame(std::span<const IdentifiedBox> gt,
                             std::span<const IdentifiedBox> hyp,
                             const Correspondence& previous,
                             Correspondence& last_seen, double match_radius) {
  FrameResult out;
  FrameTally& t = out.tally;
  t.objects = static_cast<int>(gt.size());

  std::vector<char> gt_used(gt.size(), 0), hyp_used(hyp.size(), 0);
  std::map<int, std::size_t> hyp_index;
  for (std::size_t j = 0; j < hyp.size(); ++j) hyp_index[hyp[j].id] = j;

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const auto prev = previous.find(gt[i].id);
    if (prev == previous.end()) continue;
    const auto h = hyp_index.find(prev->second);
    if (h == hyp_index.end() || hyp_used[h->second]) continue;
    if (distance(gt[i].box.center(), hyp[h->second].box.center()) <= match_radius) {
      gt_used[i] = hyp_used[h->second] = 1;
      pairs.emplace_back(i, h->second);
    }
  }

  std::vector<int> rows, cols;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt_used[i]) rows.push_back(static_cast<int>(i));
  }
  for (std::size_t j = 0; j < hyp.size(); ++j) {
    if (!hyp_used[j]) cols.push_back(static_cast<int>(j));
  }
  if (!rows.empty() && !cols.empty()) {
    CostMatrix costs(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const double d = distance(gt[rows[r]].box.center(), hyp[cols[c]].box.center());
        costs(static_cast<int>(r), static_cast<int>(c)) = d <= match_radius ? d : kInfeasible;
      }
    }
    for (const auto& [r, c] : solve_assignment(costs).matches) {
      const std::size_t i = rows[r], j = cols[c];
      gt_used[i] = hyp_used[j] = 1;
      pairs.emplace_back(i, j);
      const auto seen = last_seen.find(gt[i].id);
      if (seen != last_seen.end() && seen->second != hyp[j].id) ++t.mismatches;
    }
  }

  std::sort(pairs.begin(), pairs.end());
  for (const auto& [i, j] : pairs) {
    out.current[gt[i].id] = hyp[j].id;
    last_seen[gt[i].id] = hyp[j].id;
    t.distances.push_back(distance(gt[i].box.center(), hyp[j].box.center()));
  }
  t.matches = static_cast<int>(pairs.size());
  t.misses = t.objects - t.matches;
  t.false_positives = static_cast<int>(hyp.size()) - t.matches;
  return out;
}

double mota(std::span<const FrameTally> tallies) {
  long errors = 0, objects = 0;
  for (const FrameTally& t : tallies) {
    errors += t.misses + t.false_positives + t.mismatches;
    objects += t.objects;
  }
  if (objects == 0) throw Error(ErrorCode::kEmptyGroundTruth, "no ground-truth objects");
  return 1.0 - static_cast<double>(errors) / static_cast<double>(objects);
}

double motp(std::span<const FrameTally> tallies) {
  double sum = 0.0;
  long matches = 0;
  for (const FrameTally& t : tallies) {
    for (double d : t.distances) sum += d;
    matches += t.matches;
  }
  if (matches == 0) throw Error(ErrorCode::kNoMatches, "no matched objects");
  return sum / static_cast<double>(matches);
}

MotSummary evaluate_tracks(std::span<const TrackRecord> gt,
                           std::span<const TrackRecord> hyp, double match_radius,
                           bool use_heads) {
  std::map<int, std::pair<std::vector<IdentifiedBox>, std::vector<IdentifiedBox>>> frames;
  auto add = [&](std::span<const TrackRecord> recs, bool is_gt) {
    for (const TrackRecord& r : recs) {
      if (use_heads && !r.head) continue;
      auto& slot = frames[r.frame];
      (is_gt ? slot.first : slot.second).push_back({r.track_id, use_heads ? *r.head : r.box});
    }
  };
  add(gt, true);
  add(hyp, false);

  MotSummary s;
  std::vector<FrameTally> tallies;
  tallies.reserve(frames.size());
  Correspondence previous, last_seen;
  std::map<std::pair<int, int>, long> votes;  // (hyp, gt) -> frames
  for (auto& [frame, boxes] : frames) {
    auto by_id = [](const IdentifiedBox& a, const IdentifiedBox& b) { return a.id < b.id; };
    std::sort(boxes.first.begin(), boxes.first.end(), by_id);
    std::sort(boxes.second.begin(), boxes.second.end(), by_id);
    FrameResult r = correspond_frame(boxes.first, boxes.second, previous, last_seen,
                                     match_radius);
    for (const auto& [g, h] : r.current) ++votes[{h, g}];
    previous = std::move(r.current);
    s.misses += r.tally.misses;
    s.false_positives += r.tally.false_positives;
    s.mismatches += r.tally.mismatches;
    s.objects += r.tally.objects;
    s.matches += r.tally.matches;
    tallies.push_back(std::move(r.tally));
  }
  if (s.objects > 0) s.mota = mota(tallies);
  if (s.matches > 0) s.motp = motp(tallies);
  for (const FrameTally& t : tallies) {
    for (double d : t.distances) s.distance_sum += d;
  }

  std::map<int, long> best;
  for (const auto& [key, n] : votes) {
    const auto [h, g] = key;
    if (!best.count(h) || n > best[h]) {
      best[h] = n;
      s.hyp_to_gt[h] = g;
    }
  }
  return s;
}

double interval_iou(TimeInterval a, TimeInterval b) {
  const double inter = std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
  const double uni = (a.end - a.start) + (b.end - b.start) - inter;
  if (uni <= 0.0) return a.start == b.start && a.end == b.end ? 1.0 : 0.0;
  return inter / uni;
}

TimeInterval to_seconds(const BehaviorEvent& e, double fps) {
  return {e.start / fps, (e.end + 1) / fps};
}

EventMatchReport match_events(std::span<const BehaviorEvent> gt,
                              std::span<const BehaviorEvent> hyp, double fps) {
  struct Candidate {
    double iou;
    int g;
    int h;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    for (std::size_t j = 0; j < hyp.size(); ++j) {
      if (gt[i].track_id != hyp[j].track_id || gt[i].kind != hyp[j].kind) continue;
      const double v = interval_iou(to_seconds(gt[i], fps), to_seconds(hyp[j], fps));
      if (v > 0.0) cands.push_back({v, static_cast<int>(i), static_cast<int>(j)});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(b.iou, a.g, a.h) < std::tie(a.iou, b.g, b.h);
  });

  EventMatchReport rep;
  std::vector<char> g_used(gt.size(), 0), h_used(hyp.size(), 0);
  for (const Candidate& c : cands) {
    if (g_used[c.g] || h_used[c.h]) continue;
    g_used[c.g] = h_used[c.h] = 1;
    rep.pairs.emplace_back(c.g, c.h);
    rep.ious.push_back(c.iou);
  }
  rep.true_positives = static_cast<int>(rep.pairs.size());
  rep.insertions = static_cast<int>(hyp.size()) - rep.true_positives;
  rep.deletions = static_cast<int>(gt.size()) - rep.true_positives;
  if (rep.true_positives + rep.insertions > 0) {
    rep.precision = static_cast<double>(rep.true_positives) /
                    (rep.true_positives + rep.insertions);
  }
  if (rep.true_positives + rep.deletions > 0) {
    rep.recall = static_cast<double>(rep.true_positives) /
                 (rep.true_positives + rep.deletions);
  }
  if (!rep.ious.empty()) {
    double sum = 0.0;
    for (double v : rep.ious) sum += v;
    rep.mean_iou = sum / static_cast<double>(rep.ious.size());
  }
  return rep;
}

}  // namespace flocktrack
