// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "cli.hpp"

#include <httplib.h>

namespace fs = std::filesystem;
using namespace flocktrack::cli;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "flocktrack");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "flocktrack_cli_test";
    fs::remove_all(dir_);
    const CliResult r = run({"simulate", "--seed", "2", "--seconds", "4", "--no-frames", "--out",
                       (dir_ / "sim").string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }
  static fs::path dir_;
};

fs::path CliTest::dir_;

}  // namespace

TEST_F(CliTest, SimulateWritesInputs) {
  for (const char* f : {"detections.csv", "gt.csv", "gt_behavior.csv", "hypotheses.csv",
                        "sim_meta.json", "config.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "sim" / f)) << f;
  }
  EXPECT_FALSE(fs::exists(dir_ / "sim" / "frames"));
}

TEST_F(CliTest, TrackWritesBundleAndMedia) {
  const fs::path out = dir_ / "track";
  const CliResult r = run({"track", "--config", (dir_ / "sim" / "config.json").string(), "--out",
                     out.string(), "--media-url", "clip.mp4"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto bundle = nlohmann::json::parse(slurp(out / "bundle.json"));
  EXPECT_EQ(bundle["schema_version"], 1);
  EXPECT_EQ(bundle["tracks"].size(), 5u);
  EXPECT_EQ(nlohmann::json::parse(slurp(out / "media.json"))["video_url"], "clip.mp4");
  for (const char* f : {"tracks.csv", "table.csv", "events.csv", "summary.csv", "report.json"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }

  const CliResult ev = run({"eval", "--bundle", (out / "bundle.json").string(), "--gt",
                      (dir_ / "sim" / "gt.csv").string()});
  EXPECT_EQ(ev.code, kExitOk) << ev.err;
  EXPECT_NE(ev.out.find("MOTA"), std::string::npos);
}

TEST_F(CliTest, MissingGroundTruthStillExports) {
  const fs::path out = dir_ / "nogt";
  const CliResult r = run({"track", "--config", (dir_ / "sim" / "config.json").string(), "--out",
                     out.string(), "--gt", (dir_ / "missing.csv").string()});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_TRUE(fs::exists(out / "bundle.json"));
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, InputErrorsExitOne) {
  EXPECT_EQ(run({"track", "--detections", "/nonexistent.csv", "--out", (dir_ / "x").string()}).code,
            kExitInput);
  EXPECT_EQ(run({"bogus"}).code, kExitInput);
  EXPECT_EQ(run({"eval", "--gt", (dir_ / "sim" / "gt.csv").string()}).code, kExitInput);
  const fs::path bad = dir_ / "bad.json";
  std::ofstream(bad) << R"({"motion": {"nope": 1}})";
  EXPECT_EQ(run({"track", "--config", bad.string(), "--out", (dir_ / "y").string()}).code,
            kExitInput);
}

TEST_F(CliTest, EvalTracksCsv) {
  const CliResult r = run({"eval", "--tracks", (dir_ / "sim" / "hypotheses.csv").string(), "--gt",
                     (dir_ / "sim" / "gt.csv").string(), "--gt-behavior",
                     (dir_ / "sim" / "gt_behavior.csv").string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("MOTA   1.0000"), std::string::npos) << r.out;
}

TEST_F(CliTest, ServeSetsCorsHeader) {
  const fs::path out = dir_ / "serve";
  ASSERT_EQ(run({"export", "--config", (dir_ / "sim" / "config.json").string(), "--out",
                 out.string()}).code,
            kExitOk);
  StaticServer server(out);
  const int port = server.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen(); });
  httplib::Client client("127.0.0.1", port);
  const auto res = client.Get("/bundle.json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_EQ(nlohmann::json::parse(res->body)["schema_version"], 1);
  const auto missing = client.Get("/nothing.json");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  const auto pre = client.Options("/bundle.json");
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);
  server.stop();
  t.join();
}
