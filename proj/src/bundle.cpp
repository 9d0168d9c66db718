// SPDX-License-Identifier: Apache-2.0
#include "flocktrack/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "json_support.hpp"

namespace flocktrack {

using detail::json;

namespace {

json mot_to_json(const MotSummary& s) {
  json j = {{"misses", s.misses},
            {"false_positives", s.false_positives},
            {"mismatches", s.mismatches},
            {"objects", s.objects},
            {"matches", s.matches},
            {"distance_sum", s.distance_sum}};
  j["mota"] = s.mota ? json(*s.mota) : json(nullptr);
  j["motp"] = s.motp ? json(*s.motp) : json(nullptr);
  json map = json::array();
  for (const auto& [h, g] : s.hyp_to_gt) map.push_back({h, g});
  j["hyp_to_gt"] = map;
  return j;
}

MotSummary mot_from_json(const json& j) {
  MotSummary s;
  s.misses = j.at("misses").get<long>();
  s.false_positives = j.at("false_positives").get<long>();
  s.mismatches = j.at("mismatches").get<long>();
  s.objects = j.at("objects").get<long>();
  s.matches = j.at("matches").get<long>();
  s.distance_sum = j.at("distance_sum").get<double>();
  if (!j.at("mota").is_null()) s.mota = j.at("mota").get<double>();
  if (!j.at("motp").is_null()) s.motp = j.at("motp").get<double>();
  for (const json& p : j.at("hyp_to_gt")) s.hyp_to_gt[p.at(0).get<int>()] = p.at(1).get<int>();
  return s;
}

json events_report_to_json(const EventMatchReport& r) {
  json pairs = json::array();
  for (const auto& [g, h] : r.pairs) pairs.push_back({g, h});
  return {{"true_positives", r.true_positives},
          {"insertions", r.insertions},
          {"deletions", r.deletions},
          {"precision", r.precision},
          {"recall", r.recall},
          {"mean_iou", r.mean_iou},
          {"pairs", pairs},
          {"ious", r.ious}};
}

EventMatchReport events_report_from_json(const json& j) {
  EventMatchReport r;
  r.true_positives = j.at("true_positives").get<int>();
  r.insertions = j.at("insertions").get<int>();
  r.deletions = j.at("deletions").get<int>();
  r.precision = j.at("precision").get<double>();
  r.recall = j.at("recall").get<double>();
  r.mean_iou = j.at("mean_iou").get<double>();
  for (const json& p : j.at("pairs")) r.pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
  r.ious = j.at("ious").get<std::vector<double>>();
  return r;
}

json score_json(const ClipScore& c) {
  json score = json::object();
  if (c.body) score["body"] = mot_to_json(*c.body);
  if (c.head) score["head"] = mot_to_json(*c.head);
  json behavior = json::object();
  for (const auto& [kind, rep] : c.behavior) {
    behavior[std::string(to_string(kind))] = events_report_to_json(rep);
  }
  score["behavior"] = behavior;
  return score;
}

BehaviorKind kind_from_json(const json& j) {
  const auto k = parse_behavior_kind(j.get<std::string>());
  if (!k) throw Error(ErrorCode::kInput, "unknown behavior kind in bundle");
  return *k;
}

HeadStatus head_status_from_string(const std::string& s) {
  if (s == "tracked") return HeadStatus::kTracked;
  if (s == "lost") return HeadStatus::kLost;
  throw Error(ErrorCode::kInput, "unknown head status '" + s + "'");
}

}  // namespace

std::string_view to_string(HeadStatus s) {
  return s == HeadStatus::kTracked ? "tracked" : "lost";
}

AnalysisBundle assemble_bundle(const VideoMeta& video, int frame_count,
                               const PenLayout& layout,
                               const std::vector<TrackRecord>& records,
                               const std::vector<HeadRecord>& heads,
                               std::vector<BehaviorEvent> events) {
  AnalysisBundle b;
  b.video = video;
  b.frame_count = frame_count;
  b.layout = layout;

  std::map<int, std::map<int, const TrackRecord*>> by_track;
  for (const TrackRecord& r : records) by_track[r.track_id][r.frame] = &r;
  for (const auto& [id, frames] : by_track) {
    TrackSeries s;
    s.id = id;
    for (const auto& [f, r] : frames) {
      s.frames.push_back(f);
      s.x.push_back(r->box.cx);
      s.y.push_back(r->box.cy);
      s.w.push_back(r->box.w);
      s.h.push_back(r->box.h);
    }
    b.tracks.push_back(std::move(s));
  }

  std::map<int, std::map<int, const HeadRecord*>> heads_by_track;
  for (const HeadRecord& h : heads) heads_by_track[h.track_id][h.frame] = &h;
  for (const auto& [id, frames] : heads_by_track) {
    HeadSeries s;
    s.id = id;
    for (const auto& [f, h] : frames) {
      s.frames.push_back(f);
      s.x.push_back(h->center.x);
      s.y.push_back(h->center.y);
      s.status.push_back(h->status);
    }
    b.heads.push_back(std::move(s));
  }

  std::map<int, DistanceSeries> dist;
  std::map<int, Point> last;
  for (int t = 0;; ++t) {
    const int f = static_cast<int>(std::lround(t * video.fps));
    if (f >= frame_count) break;
    for (const auto& [id, frames] : by_track) {
      const auto it = frames.find(f);
      if (it == frames.end()) continue;
      const BoundingBox& box = it->second->box;
      b.table.push_back({t, id, box.cx, box.cy, box.w, box.h});
      DistanceSeries& d = dist[id];
      d.id = id;
      const Point p = box.center();
      const double prev = d.cumulative.empty() ? 0.0 : d.cumulative.back();
      d.cumulative.push_back(d.cumulative.empty() ? 0.0 : prev + distance(last[id], p));
      d.t.push_back(t);
      last[id] = p;
    }
  }
  for (auto& [id, d] : dist) b.distance.push_back(std::move(d));

  b.events = merge_events(std::move(events), video.fps, 0.0);
  b.summary = summarize(b.events, video.fps);
  return b;
}

std::vector<TrackRecord> bundle_records(const AnalysisBundle& bundle, int head_patch) {
  std::map<std::pair<int, int>, const HeadSeries*> head_at;
  std::map<std::pair<int, int>, std::size_t> head_index;
  for (const HeadSeries& h : bundle.heads) {
    for (std::size_t i = 0; i < h.frames.size(); ++i) {
      head_at[{h.id, h.frames[i]}] = &h;
      head_index[{h.id, h.frames[i]}] = i;
    }
  }
  std::vector<TrackRecord> out;
  for (const TrackSeries& s : bundle.tracks) {
    for (std::size_t i = 0; i < s.frames.size(); ++i) {
      TrackRecord r{s.frames[i], s.id, {s.x[i], s.y[i], s.w[i], s.h[i]}, std::nullopt};
      const auto it = head_at.find({s.id, s.frames[i]});
      if (it != head_at.end()) {
        const std::size_t k = head_index.at({s.id, s.frames[i]});
        if (it->second->status[k] == HeadStatus::kTracked) {
          r.head = BoundingBox{it->second->x[k], it->second->y[k],
                               static_cast<double>(head_patch),
                               static_cast<double>(head_patch)};
        }
      }
      out.push_back(r);
    }
  }
  std::sort(out.begin(), out.end(), [](const TrackRecord& a, const TrackRecord& b) {
    return std::tie(a.frame, a.track_id) < std::tie(b.frame, b.track_id);
  });
  return out;
}

std::string score_to_json(const ClipScore& score) { return score_json(score).dump(2) + "\n"; }

std::string bundle_to_json(const AnalysisBundle& b) {
  json root;
  root["schema_version"] = b.schema_version;
  root["meta"] = {{"width", b.video.width},
                  {"height", b.video.height},
                  {"fps", b.video.fps},
                  {"frame_count", b.frame_count},
                  {"duration_s", b.frame_count / b.video.fps}};
  root["pen"] = detail::layout_to_json(b.layout);

  json tracks = json::array();
  for (const TrackSeries& s : b.tracks) {
    tracks.push_back({{"id", s.id}, {"frames", s.frames}, {"x", s.x}, {"y", s.y},
                      {"w", s.w}, {"h", s.h}});
  }
  root["tracks"] = std::move(tracks);

  json heads = json::array();
  for (const HeadSeries& s : b.heads) {
    json status = json::array();
    for (HeadStatus st : s.status) status.push_back(to_string(st));
    heads.push_back({{"id", s.id}, {"frames", s.frames}, {"x", s.x}, {"y", s.y},
                     {"status", status}});
  }
  root["heads"] = std::move(heads);

  json rows = json::array();
  for (const TableRow& r : b.table) rows.push_back({r.t, r.track_id, r.x, r.y, r.w, r.h});
  root["table"] = {{"columns", {"t", "track_id", "x", "y", "w", "h"}}, {"rows", rows}};

  json dist = json::array();
  for (const DistanceSeries& d : b.distance) {
    dist.push_back({{"id", d.id}, {"t", d.t}, {"cumulative", d.cumulative}});
  }
  root["distance"] = std::move(dist);

  json events = json::array();
  for (const BehaviorEvent& e : b.events) {
    events.push_back({{"track_id", e.track_id},
                      {"kind", to_string(e.kind)},
                      {"start_frame", e.start},
                      {"end_frame", e.end},
                      {"start_s", e.start / b.video.fps},
                      {"end_s", (e.end + 1) / b.video.fps},
                      {"low_confidence", e.low_confidence}});
  }
  root["events"] = std::move(events);

  json summary = json::array();
  for (const auto& [key, st] : b.summary) {
    summary.push_back({{"track_id", key.first},
                       {"kind", to_string(key.second)},
                       {"count", st.count},
                       {"total_s", st.total_s},
                       {"mean_s", st.mean_s}});
  }
  root["summary"] = std::move(summary);

  if (b.score) root["score"] = score_json(*b.score);
  return root.dump();
}

AnalysisBundle bundle_from_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInput, std::string("bundle is not valid JSON: ") + e.what());
  }
  try {
    AnalysisBundle b;
    b.schema_version = root.at("schema_version").get<int>();
    if (b.schema_version != kBundleSchemaVersion) {
      throw Error(ErrorCode::kInput,
                  "unsupported bundle schema_version " + std::to_string(b.schema_version));
    }
    const json& meta = root.at("meta");
    b.video = {meta.at("width").get<int>(), meta.at("height").get<int>(),
               meta.at("fps").get<double>()};
    b.frame_count = meta.at("frame_count").get<int>();
    b.layout = detail::layout_from_json(root.at("pen"), b.video, "pen");

    for (const json& t : root.at("tracks")) {
      TrackSeries s;
      s.id = t.at("id").get<int>();
      s.frames = t.at("frames").get<std::vector<int>>();
      s.x = t.at("x").get<std::vector<double>>();
      s.y = t.at("y").get<std::vector<double>>();
      s.w = t.at("w").get<std::vector<double>>();
      s.h = t.at("h").get<std::vector<double>>();
      b.tracks.push_back(std::move(s));
    }
    for (const json& h : root.at("heads")) {
      HeadSeries s;
      s.id = h.at("id").get<int>();
      s.frames = h.at("frames").get<std::vector<int>>();
      s.x = h.at("x").get<std::vector<double>>();
      s.y = h.at("y").get<std::vector<double>>();
      for (const json& st : h.at("status")) s.status.push_back(head_status_from_string(st.get<std::string>()));
      b.heads.push_back(std::move(s));
    }
    for (const json& r : root.at("table").at("rows")) {
      b.table.push_back({r.at(0).get<int>(), r.at(1).get<int>(), r.at(2).get<double>(),
                         r.at(3).get<double>(), r.at(4).get<double>(), r.at(5).get<double>()});
    }
    for (const json& d : root.at("distance")) {
      b.distance.push_back({d.at("id").get<int>(), d.at("t").get<std::vector<int>>(),
                            d.at("cumulative").get<std::vector<double>>()});
    }
    for (const json& e : root.at("events")) {
      b.events.push_back({e.at("track_id").get<int>(), kind_from_json(e.at("kind")),
                          e.at("start_frame").get<int>(), e.at("end_frame").get<int>(),
                          e.at("low_confidence").get<bool>()});
    }
    for (const json& s : root.at("summary")) {
      b.summary[{s.at("track_id").get<int>(), kind_from_json(s.at("kind"))}] = {
          s.at("count").get<int>(), s.at("total_s").get<double>(), s.at("mean_s").get<double>()};
    }
    if (root.contains("score")) {
      const json& s = root.at("score");
      ClipScore score;
      if (s.contains("body")) score.body = mot_from_json(s.at("body"));
      if (s.contains("head")) score.head = mot_from_json(s.at("head"));
      for (const auto& [kind, rep] : s.at("behavior").items()) {
        score.behavior[kind_from_json(json(kind))] = events_report_from_json(rep);
      }
      b.score = std::move(score);
    }
    return b;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInput, std::string("malformed bundle: ") + e.what());
  }
}

void export_bundle(const AnalysisBundle& bundle, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write bundle " + path.string());
  out << bundle_to_json(bundle) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "failed writing bundle " + path.string());
}

AnalysisBundle import_bundle(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInput, "cannot open bundle " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return bundle_from_json(ss.str());
}

}  // namespace flocktrack
