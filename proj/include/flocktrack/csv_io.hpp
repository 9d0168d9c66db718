// SPDX-License-Identifier: Apache-2.0
//
// Detection / track CSV (header frame,x,y,w,h,conf with optional id and
// head_x,head_y,head_w,head_h columns; x, y are box centers) and behavior
// CSV (track_id,kind,start_s,end_s).

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "flocktrack/behavior.hpp"
#include "flocktrack/types.hpp"

namespace flocktrack {

struct DetectionFile {
  std::vector<Detection> detections;  // sorted by frame (stable)
  std::vector<int> ids;               // parallel to detections when has_ids
  bool has_ids = false;
  std::vector<std::string> warnings;

  // Requires has_ids; head boxes come from the head columns.
  std::vector<TrackRecord> records() const;
};

// Throws kInput with "<source>:<line>: <reason>" on the first bad row.
DetectionFile parse_detection_csv(std::istream& in, const std::string& source = "<input>");
DetectionFile read_detection_csv(const std::filesystem::path& path);

void write_detection_csv(const std::filesystem::path& path,
                         const std::vector<Detection>& detections);
// With an id column; head columns when any record has a head.
void write_track_csv(const std::filesystem::path& path,
                     const std::vector<TrackRecord>& records);

// Times in seconds; a frame interval [s, e] is written as
// [s / fps, (e + 1) / fps] and read back with the inverse rounding.
std::vector<BehaviorEvent> parse_behavior_csv(std::istream& in, double fps,
                                              const std::string& source = "<input>");
std::vector<BehaviorEvent> read_behavior_csv(const std::filesystem::path& path, double fps);
void write_behavior_csv(const std::filesystem::path& path,
                        const std::vector<BehaviorEvent>& events, double fps);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace flocktrack
