// SPDX-License-Identifier: Apache-2.0
//
// Analysis bundle: the single JSON document a pipeline run exports for the
// web explorer. Layout (schema_version 1), all times in seconds unless the
// key says frames:
//
//   schema_version  1
//   meta            {width, height, fps, frame_count, duration_s}
//   pen             {bounds, feeder, drinker}
//   tracks          [{id, frames[], x[], y[], w[], h[]}]      full rate, centers
//   heads           [{id, frames[], x[], y[], status[]}]      "tracked" | "lost"
//   table           {columns: [t, track_id, x, y, w, h], rows: [[...], ...]}
//                   one row per track per whole second s, sampled at frame
//                   round(s * fps) when the track has a record there
//   distance        [{id, t[], cumulative[]}]  path length along the table rows
//   events          [{track_id, kind, start_frame, end_frame, start_s, end_s,
//                     low_confidence}]
//   summary         [{track_id, kind, count, total_s, mean_s}]
//   score           optional, see ClipScore

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flocktrack/behavior.hpp"
#include "flocktrack/head_tracker.hpp"
#include "flocktrack/metrics.hpp"
#include "flocktrack/types.hpp"

namespace flocktrack {

inline constexpr int kBundleSchemaVersion = 1;

struct TrackSeries {
  int id = 0;
  std::vector<int> frames;
  std::vector<double> x, y, w, h;

  friend bool operator==(const TrackSeries&, const TrackSeries&) = default;
};

struct HeadSeries {
  int id = 0;
  std::vector<int> frames;
  std::vector<double> x, y;
  std::vector<HeadStatus> status;

  friend bool operator==(const HeadSeries&, const HeadSeries&) = default;
};

struct TableRow {
  int t = 0;  // whole seconds
  int track_id = 0;
  double x = 0.0, y = 0.0, w = 0.0, h = 0.0;

  friend bool operator==(const TableRow&, const TableRow&) = default;
};

struct DistanceSeries {
  int id = 0;
  std::vector<int> t;
  std::vector<double> cumulative;

  friend bool operator==(const DistanceSeries&, const DistanceSeries&) = default;
};

struct AnalysisBundle {
  int schema_version = kBundleSchemaVersion;
  VideoMeta video;
  int frame_count = 0;
  PenLayout layout;
  std::vector<TrackSeries> tracks;  // sorted by id
  std::vector<HeadSeries> heads;    // sorted by id
  std::vector<TableRow> table;      // sorted by (t, track_id)
  std::vector<DistanceSeries> distance;
  std::vector<BehaviorEvent> events;
  BehaviorSummary summary;
  std::optional<ClipScore> score;

  friend bool operator==(const AnalysisBundle&, const AnalysisBundle&) = default;
};

struct HeadRecord {
  int frame = 0;
  int track_id = 0;
  Point center;
  HeadStatus status = HeadStatus::kTracked;
};

// Builds the derived views (table, distance, summary) from full-rate
// records. `records` and `heads` may be in any order.
AnalysisBundle assemble_bundle(const VideoMeta& video, int frame_count,
                               const PenLayout& layout,
                               const std::vector<TrackRecord>& records,
                               const std::vector<HeadRecord>& heads,
                               std::vector<BehaviorEvent> events);

// Body records with head boxes (patch-sized, tracked frames only).
std::vector<TrackRecord> bundle_records(const AnalysisBundle& bundle, int head_patch = 25);

std::string bundle_to_json(const AnalysisBundle& bundle);
// Throws kInput on malformed documents or an unsupported schema_version.
AnalysisBundle bundle_from_json(std::string_view text);

// Throws kIo naming the path.
void export_bundle(const AnalysisBundle& bundle, const std::filesystem::path& path);
AnalysisBundle import_bundle(const std::filesystem::path& path);

std::string_view to_string(HeadStatus s);

// The "score" member on its own, as written next to a bundle.
std::string score_to_json(const ClipScore& score);

}  // namespace flocktrack
