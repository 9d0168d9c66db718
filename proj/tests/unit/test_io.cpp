// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <json.hpp>
#include <sstream>

#include "flocktrack/bundle.hpp"
#include "flocktrack/config.hpp"
#include "flocktrack/csv_io.hpp"
#include "flocktrack/error.hpp"

using namespace flocktrack;

namespace {

DetectionFile parse(const std::string& text) {
  std::istringstream in(text);
  return parse_detection_csv(in, "det.csv");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInput);
    return e.what();
  }
  return "";
}

}  // namespace

TEST(DetectionCsv, HeaderOnlyIsEmpty) {
  const DetectionFile f = parse("frame,x,y,w,h,conf\n");
  EXPECT_TRUE(f.detections.empty());
  EXPECT_FALSE(f.has_ids);
}

TEST(DetectionCsv, SingleRow) {
  const DetectionFile f = parse("frame,x,y,w,h,conf\n0,10.5,20,30,40,0.9\n");
  ASSERT_EQ(f.detections.size(), 1u);
  EXPECT_EQ(f.detections[0].box, (BoundingBox{10.5, 20, 30, 40}));
  EXPECT_EQ(f.detections[0].confidence, 0.9);
}

TEST(DetectionCsv, ErrorsNameTheLine) {
  EXPECT_EQ(error_of(""), "det.csv:1: missing header");
  EXPECT_EQ(error_of("frame,x,y,w,h\n0,1,1,2,2\n1,1,1,0,2\n"),
            "det.csv:3: box width and height must be positive");
  EXPECT_NE(error_of("frame,x,y,w,h\n0,1,1,2\n").find("det.csv:2:"), std::string::npos);
  EXPECT_NE(error_of("frame,x,y,w\n").find("missing column 'h'"), std::string::npos);
  EXPECT_NE(error_of("frame,x,y,w,h,bogus\n").find("unknown column"), std::string::npos);
  EXPECT_NE(error_of("frame,x,y,w,h,head_x\n").find("together"), std::string::npos);
  EXPECT_NE(error_of("frame,x,y,w,h,head_x,head_y,head_w,head_h\n3,1,1,2,2,1,1,1,1\n")
                .find("frame 0"),
            std::string::npos);
}

TEST(DetectionCsv, UnsortedFramesWarnAndSortStably) {
  const DetectionFile f = parse("frame,x,y,w,h\n2,1,1,2,2\n0,5,1,2,2\n0,6,1,2,2\n");
  ASSERT_EQ(f.warnings.size(), 1u);
  EXPECT_NE(f.warnings[0].find("det.csv:3"), std::string::npos);
  ASSERT_EQ(f.detections.size(), 3u);
  EXPECT_EQ(f.detections[0].box.cx, 5);
  EXPECT_EQ(f.detections[1].box.cx, 6);
  EXPECT_EQ(f.detections[2].frame, 2);
}

TEST(DetectionCsv, TrackRoundTrip) {
  const std::vector<TrackRecord> recs = {{0, 3, {1.25, 2, 3, 4}, BoundingBox{1, 1, 2, 2}},
                                         {1, 4, {0.1, 1e-7, 30, 40}, std::nullopt}};
  const auto path = std::filesystem::temp_directory_path() / "flocktrack_tracks.csv";
  write_track_csv(path, recs);
  const DetectionFile f = read_detection_csv(path);
  EXPECT_TRUE(f.has_ids);
  EXPECT_EQ(f.records(), recs);
  std::filesystem::remove(path);
}

TEST(BehaviorCsv, SecondsRoundTrip) {
  const std::vector<BehaviorEvent> events = {{2, BehaviorKind::kEating, 30, 179, false},
                                             {1, BehaviorKind::kWalking, 0, 0, false}};
  const auto path = std::filesystem::temp_directory_path() / "flocktrack_events.csv";
  write_behavior_csv(path, events, 30.0);
  EXPECT_EQ(read_behavior_csv(path, 30.0), events);
  std::filesystem::remove(path);
  std::istringstream bad("track_id,kind,start_s,end_s\n1,sleeping,0,1\n");
  EXPECT_THROW(parse_behavior_csv(bad, 30.0), Error);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  for (double v : {1.0 / 3.0, 1e-300, 123456.789, -0.0625}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(Config, RoundTrip) {
  PipelineConfig c;
  c.video.fps = 25;
  c.frame_count = 10;
  c.motion.max_age = 12;
  c.appearance.enabled = false;
  c.head.refine = false;
  c.association.lambda = 0.25;
  c.layout.pen_bounds = {0, 0, 1280, 720};
  c.layout.feeder = {{10, 10}, {100, 10}, {100, 100}};
  c.metrics.skip_frames = 4;
  c.paths.gt = "gt.csv";
  const PipelineConfig back = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  EXPECT_EQ(back.layout, c.layout);
  EXPECT_EQ(back.motion.max_age, 12);
  EXPECT_FALSE(back.head.refine);
}

TEST(Config, EmptyObjectGivesDefaults) {
  EXPECT_EQ(config_to_json(parse_config("{}")), config_to_json(PipelineConfig{}));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  for (const char* text : {R"({"motion": {"max_agee": 3}})", R"({"colour": {}})",
                           R"({"motion": {"max_age": "x"}})", R"({"association": {"lambda": 2}})",
                           "not json"}) {
    try {
      parse_config(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConfig) << text;
    }
  }
  try {
    parse_config(R"({"motion": {"max_agee": 3}})");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("max_agee"), std::string::npos);
  }
}

namespace {

AnalysisBundle sample_bundle() {
  std::vector<TrackRecord> recs;
  std::vector<HeadRecord> heads;
  // Track 1 walks right at 3 px/frame over 4 s; track 2 appears at frame 45.
  for (int f = 0; f < 120; ++f) {
    recs.push_back({f, 1, {100.0 + 3.0 * f, 200, 60, 44}, std::nullopt});
    heads.push_back({f, 1, {116.0 + 3.0 * f, 200}, f < 60 ? HeadStatus::kTracked : HeadStatus::kLost});
    if (f >= 45) recs.push_back({f, 2, {500, 400, 60, 44}, std::nullopt});
  }
  PenLayout layout{{{600, 50}, {700, 50}, {700, 150}}, {}, {0, 0, 1280, 720}};
  return assemble_bundle({1280, 720, 30.0}, 120, layout, recs, heads,
                         {{1, BehaviorKind::kWalking, 0, 119, false}});
}

}  // namespace

TEST(Bundle, DerivedViews) {
  const AnalysisBundle b = sample_bundle();
  ASSERT_EQ(b.tracks.size(), 2u);
  EXPECT_EQ(b.tracks[1].frames.front(), 45);
  // Rows at frames 0, 30, 60, 90 for track 1; 60, 90 for track 2.
  ASSERT_EQ(b.table.size(), 6u);
  EXPECT_EQ(b.table[0], (TableRow{0, 1, 100, 200, 60, 44}));
  EXPECT_EQ(b.table[2].t, 2);
  EXPECT_EQ(b.table[2].track_id, 1);
  EXPECT_EQ(b.table[3].track_id, 2);
  ASSERT_EQ(b.distance.size(), 2u);
  EXPECT_EQ(b.distance[0].cumulative, (std::vector<double>{0, 90, 180, 270}));
  EXPECT_EQ(b.distance[1].cumulative, (std::vector<double>{0, 0}));
  const BehaviorStats& s = b.summary.at({1, BehaviorKind::kWalking});
  EXPECT_EQ(s.count, 1);
  EXPECT_DOUBLE_EQ(s.total_s, 4.0);

  const std::vector<TrackRecord> back = bundle_records(b, 25);
  const auto with_head = std::count_if(back.begin(), back.end(),
                                       [](const TrackRecord& r) { return r.head.has_value(); });
  EXPECT_EQ(with_head, 60);
}

TEST(Bundle, JsonRoundTripAndSchema) {
  const AnalysisBundle b = sample_bundle();
  const std::string text = bundle_to_json(b);
  EXPECT_EQ(bundle_from_json(text), b);
  const auto doc = nlohmann::json::parse(text);
  EXPECT_EQ(doc.at("schema_version"), 1);
  for (const char* key : {"meta", "pen", "tracks", "heads", "table", "distance", "events", "summary"}) {
    EXPECT_TRUE(doc.contains(key)) << key;
  }
  EXPECT_EQ(doc["table"]["columns"],
            nlohmann::json({"t", "track_id", "x", "y", "w", "h"}));
  EXPECT_EQ(doc["heads"][0]["status"][60], "lost");
  EXPECT_DOUBLE_EQ(doc["meta"]["duration_s"].get<double>(), 4.0);

  auto bumped = doc;
  bumped["schema_version"] = 2;
  EXPECT_THROW(bundle_from_json(bumped.dump()), Error);
  EXPECT_THROW(bundle_from_json("{"), Error);
}

TEST(Bundle, FileRoundTripAndIoError) {
  const AnalysisBundle b = sample_bundle();
  const auto path = std::filesystem::temp_directory_path() / "flocktrack_bundle.json";
  export_bundle(b, path);
  EXPECT_EQ(import_bundle(path), b);
  std::filesystem::remove(path);
  try {
    export_bundle(b, "/nonexistent-dir/bundle.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir"), std::string::npos);
  }
}
