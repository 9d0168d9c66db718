// SPDX-License-Identifier: Apache-2.0
#include "flocktrack/association.hpp"

#include <algorithm>

namespace flocktrack {

namespace {

// Solves on the sub-matrix and maps indices back to the caller's arrays.
void assign_subset(const CostMatrix& costs, std::span<const int> rows,
                   std::span<const int> cols,
                   std::vector<std::pair<int, int>>& matches,
                   std::vector<int>& unmatched_rows,
                   std::vector<int>& unmatched_cols) {
  const AssignmentResult r = solve_assignment(costs);
  for (const auto& [i, j] : r.matches) matches.emplace_back(rows[i], cols[j]);
  for (int i : r.unmatched_rows) unmatched_rows.push_back(rows[i]);
  unmatched_cols.clear();
  for (int j : r.unmatched_cols) unmatched_cols.push_back(cols[j]);
}

}  // namespace

CostMatrix build_costs(std::span<const Track> tracks,
                       std::span<const int> track_indices,
                       std::span<const Detection> detections,
                       std::span<const int> det_indices,
                       std::span<const AppearanceFeature> features,
                       const AssociationConfig& cfg,
                       const MotionConfig& motion) {
  CostMatrix costs(static_cast<int>(track_indices.size()),
                   static_cast<int>(det_indices.size()));
  for (int r = 0; r < costs.rows(); ++r) {
    const Track& t = tracks[track_indices[r]];
    const bool use_appearance = !features.empty() && !t.gallery.empty();
    for (int c = 0; c < costs.cols(); ++c) {
      const int d = det_indices[c];
      const double maha = gating_distance(t, detections[d], motion);
      if (maha > cfg.maha_gate) {
        costs(r, c) = kInfeasible;
        continue;
      }
      const double maha_term = maha / cfg.maha_gate;
      if (!use_appearance) {
        costs(r, c) = maha_term;
        continue;
      }
      const double cos = cosine_distance(features[d], t.gallery);
      if (cos > cfg.cos_gate) {
        costs(r, c) = kInfeasible;
        continue;
      }
      costs(r, c) = cfg.lambda * maha_term + (1.0 - cfg.lambda) * cos;
    }
  }
  return costs;
}

AssignmentResult matching_cascade(std::span<const Track> tracks,
                                  std::span<const Detection> detections,
                                  std::span<const AppearanceFeature> features,
                                  int max_age, const AssociationConfig& cfg,
                                  const MotionConfig& motion) {
  AssignmentResult result;
  std::vector<int> unmatched_dets(detections.size());
  for (std::size_t j = 0; j < detections.size(); ++j) unmatched_dets[j] = static_cast<int>(j);

  std::vector<int> confirmed, tentative;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    if (tracks[i].confirmed()) {
      confirmed.push_back(static_cast<int>(i));
    } else if (tracks[i].tentative()) {
      tentative.push_back(static_cast<int>(i));
    }
  }

  // Stage 1: confirmed tracks, most recently updated first.
  std::vector<char> matched_track(tracks.size(), 0);
  for (int level = 0; level <= max_age && !unmatched_dets.empty(); ++level) {
    std::vector<int> rows;
    for (int i : confirmed) {
      if (tracks[i].lifecycle.time_since_update == level + 1) rows.push_back(i);
    }
    if (rows.empty()) continue;
    const CostMatrix costs =
        build_costs(tracks, rows, detections, unmatched_dets, features, cfg, motion);
    std::vector<int> level_unmatched_rows, remaining;
    const std::vector<int> cols = unmatched_dets;
    assign_subset(costs, rows, cols, result.matches, level_unmatched_rows, remaining);
    unmatched_dets = remaining;
  }
  for (const auto& m : result.matches) matched_track[m.first] = 1;

  // Stage 2: IOU fallback for tentative tracks and confirmed tracks that
  // missed exactly one frame.
  std::vector<int> iou_rows = tentative;
  std::vector<int> unmatched_tracks;
  for (int i : confirmed) {
    if (matched_track[i]) continue;
    if (tracks[i].lifecycle.time_since_update == 1) {
      iou_rows.push_back(i);
    } else {
      unmatched_tracks.push_back(i);
    }
  }
  std::sort(iou_rows.begin(), iou_rows.end());
  if (!iou_rows.empty() && !unmatched_dets.empty()) {
    CostMatrix costs(static_cast<int>(iou_rows.size()),
                     static_cast<int>(unmatched_dets.size()));
    for (int r = 0; r < costs.rows(); ++r) {
      const BoundingBox pred = tracks[iou_rows[r]].predicted_box();
      for (int c = 0; c < costs.cols(); ++c) {
        const double overlap = iou(pred, detections[unmatched_dets[c]].box);
        costs(r, c) = overlap < cfg.iou_gate ? kInfeasible : 1.0 - overlap;
      }
    }
    std::vector<int> remaining;
    const std::vector<int> cols = unmatched_dets;
    assign_subset(costs, iou_rows, cols, result.matches, unmatched_tracks, remaining);
    unmatched_dets = remaining;
  } else {
    unmatched_tracks.insert(unmatched_tracks.end(), iou_rows.begin(), iou_rows.end());
  }

  std::sort(result.matches.begin(), result.matches.end());
  std::sort(unmatched_tracks.begin(), unmatched_tracks.end());
  std::sort(unmatched_dets.begin(), unmatched_dets.end());
  result.unmatched_rows = std::move(unmatched_tracks);
  result.unmatched_cols = std::move(unmatched_dets);
  return result;
}

}  // namespace flocktrack
