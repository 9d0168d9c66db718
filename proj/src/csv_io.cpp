// SPDX-License-Identifier: Apache-2.0
#include "flocktrack/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "flocktrack/error.hpp"

namespace flocktrack {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
    out.push_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& why) {
  throw Error(ErrorCode::kInput, source + ":" + std::to_string(line) + ": " + why);
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Reads non-blank lines, stripping a trailing CR; returns (line number, text).
std::vector<std::pair<int, std::string>> read_lines(std::istream& in) {
  std::vector<std::pair<int, std::string>> lines;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.emplace_back(n, std::move(line));
  }
  return lines;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInput, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

void append_box(std::string& s, const BoundingBox& b) {
  s += format_double(b.cx);
  s += ',';
  s += format_double(b.cy);
  s += ',';
  s += format_double(b.w);
  s += ',';
  s += format_double(b.h);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::vector<TrackRecord> DetectionFile::records() const {
  if (!has_ids) throw Error(ErrorCode::kInput, "file has no id column");
  std::vector<TrackRecord> out;
  out.reserve(detections.size());
  for (std::size_t i = 0; i < detections.size(); ++i) {
    out.push_back({detections[i].frame, ids[i], detections[i].box, detections[i].head_init});
  }
  return out;
}

DetectionFile parse_detection_csv(std::istream& in, const std::string& source) {
  const auto lines = read_lines(in);
  if (lines.empty()) fail(source, 1, "missing header");

  std::map<std::string, int, std::less<>> col;
  const auto header = split(lines.front().second);
  static const std::vector<std::string> known = {"frame", "x", "y", "w", "h", "conf", "id",
                                                 "head_x", "head_y", "head_w", "head_h"};
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name(header[i]);
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      fail(source, lines.front().first, "unknown column '" + name + "'");
    }
    if (!col.emplace(name, static_cast<int>(i)).second) {
      fail(source, lines.front().first, "duplicate column '" + name + "'");
    }
  }
  for (const char* required : {"frame", "x", "y", "w", "h"}) {
    if (!col.count(required)) {
      fail(source, lines.front().first, std::string("missing column '") + required + "'");
    }
  }
  const int head_cols = static_cast<int>(col.count("head_x") + col.count("head_y") +
                                         col.count("head_w") + col.count("head_h"));
  if (head_cols != 0 && head_cols != 4) {
    fail(source, lines.front().first, "head columns must appear together");
  }

  DetectionFile file;
  file.has_ids = col.count("id") > 0;
  int last_frame = -1;
  bool warned = false;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const int n = lines[li].first;
    const auto cells = split(lines[li].second);
    if (cells.size() != header.size()) {
      fail(source, n, "expected " + std::to_string(header.size()) + " fields, got " +
                          std::to_string(cells.size()));
    }
    auto num = [&](const char* name) {
      const auto v = to_double(cells[col.at(name)]);
      if (!v) fail(source, n, std::string("bad number in column '") + name + "'");
      return *v;
    };
    Detection d;
    const auto frame = to_int(cells[col.at("frame")]);
    if (!frame || *frame < 0) fail(source, n, "frame must be a non-negative integer");
    d.frame = *frame;
    d.box = {num("x"), num("y"), num("w"), num("h")};
    if (!(d.box.w > 0.0 && d.box.h > 0.0)) fail(source, n, "box width and height must be positive");
    if (col.count("conf")) {
      d.confidence = num("conf");
      if (d.confidence < 0.0 || d.confidence > 1.0) fail(source, n, "conf must lie in [0, 1]");
    }
    if (head_cols == 4) {
      int filled = 0;
      for (const char* c : {"head_x", "head_y", "head_w", "head_h"}) {
        filled += cells[col.at(c)].empty() ? 0 : 1;
      }
      if (filled != 0 && filled != 4) fail(source, n, "incomplete head box");
      if (filled == 4) {
        const BoundingBox head{num("head_x"), num("head_y"), num("head_w"), num("head_h")};
        if (!(head.w > 0.0 && head.h > 0.0)) fail(source, n, "head box must have positive size");
        if (!file.has_ids && d.frame != 0) {
          fail(source, n, "head initialization rows are only allowed at frame 0");
        }
        d.head_init = head;
      }
    }
    if (file.has_ids) {
      const auto id = to_int(cells[col.at("id")]);
      if (!id) fail(source, n, "id must be an integer");
      file.ids.push_back(*id);
    }
    if (d.frame < last_frame && !warned) {
      file.warnings.push_back(source + ":" + std::to_string(n) +
                              ": frames are not in increasing order; rows were sorted");
      warned = true;
    }
    last_frame = std::max(last_frame, d.frame);
    file.detections.push_back(d);
  }

  if (warned) {
    std::vector<std::size_t> order(file.detections.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return file.detections[a].frame < file.detections[b].frame;
    });
    DetectionFile sorted;
    sorted.has_ids = file.has_ids;
    sorted.warnings = std::move(file.warnings);
    for (std::size_t i : order) {
      sorted.detections.push_back(file.detections[i]);
      if (file.has_ids) sorted.ids.push_back(file.ids[i]);
    }
    return sorted;
  }
  return file;
}

DetectionFile read_detection_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  return parse_detection_csv(in, path.string());
}

void write_detection_csv(const std::filesystem::path& path,
                         const std::vector<Detection>& detections) {
  const bool heads = std::any_of(detections.begin(), detections.end(),
                                 [](const Detection& d) { return d.head_init.has_value(); });
  std::string s = heads ? "frame,x,y,w,h,conf,head_x,head_y,head_w,head_h\n"
                        : "frame,x,y,w,h,conf\n";
  for (const Detection& d : detections) {
    s += std::to_string(d.frame);
    s += ',';
    append_box(s, d.box);
    s += ',';
    s += format_double(d.confidence);
    if (heads) {
      s += ',';
      if (d.head_init) {
        append_box(s, *d.head_init);
      } else {
        s += ",,,";
      }
    }
    s += '\n';
  }
  std::ofstream out = open_out(path);
  out << s;
}

void write_track_csv(const std::filesystem::path& path,
                     const std::vector<TrackRecord>& records) {
  const bool heads = std::any_of(records.begin(), records.end(),
                                 [](const TrackRecord& r) { return r.head.has_value(); });
  std::string s = heads ? "frame,id,x,y,w,h,conf,head_x,head_y,head_w,head_h\n"
                        : "frame,id,x,y,w,h,conf\n";
  for (const TrackRecord& r : records) {
    s += std::to_string(r.frame);
    s += ',';
    s += std::to_string(r.track_id);
    s += ',';
    append_box(s, r.box);
    s += ",1";
    if (heads) {
      s += ',';
      if (r.head) {
        append_box(s, *r.head);
      } else {
        s += ",,,";
      }
    }
    s += '\n';
  }
  std::ofstream out = open_out(path);
  out << s;
}

std::vector<BehaviorEvent> parse_behavior_csv(std::istream& in, double fps,
                                              const std::string& source) {
  const auto lines = read_lines(in);
  if (lines.empty()) fail(source, 1, "missing header");
  const auto header = split(lines.front().second);
  const std::vector<std::string_view> expected = {"track_id", "kind", "start_s", "end_s"};
  if (header != expected) fail(source, lines.front().first, "header must be track_id,kind,start_s,end_s");

  std::vector<BehaviorEvent> events;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const int n = lines[li].first;
    const auto cells = split(lines[li].second);
    if (cells.size() != 4) fail(source, n, "expected 4 fields");
    const auto id = to_int(cells[0]);
    const auto kind = parse_behavior_kind(cells[1]);
    const auto s = to_double(cells[2]);
    const auto e = to_double(cells[3]);
    if (!id) fail(source, n, "track_id must be an integer");
    if (!kind) fail(source, n, "unknown behavior '" + std::string(cells[1]) + "'");
    if (!s || !e || *s < 0.0 || *e <= *s) fail(source, n, "need 0 <= start_s < end_s");
    const int start = static_cast<int>(std::lround(*s * fps));
    const int end = std::max(start, static_cast<int>(std::lround(*e * fps)) - 1);
    events.push_back({*id, *kind, start, end, false});
  }
  return events;
}

std::vector<BehaviorEvent> read_behavior_csv(const std::filesystem::path& path, double fps) {
  std::ifstream in = open_in(path);
  return parse_behavior_csv(in, fps, path.string());
}

void write_behavior_csv(const std::filesystem::path& path,
                        const std::vector<BehaviorEvent>& events, double fps) {
  std::string s = "track_id,kind,start_s,end_s\n";
  for (const BehaviorEvent& e : events) {
    s += std::to_string(e.track_id);
    s += ',';
    s += to_string(e.kind);
    s += ',';
    s += format_double(e.start / fps);
    s += ',';
    s += format_double((e.end + 1) / fps);
    s += '\n';
  }
  std::ofstream out = open_out(path);
  out << s;
}

}  // namespace flocktrack
