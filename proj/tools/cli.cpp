// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "flocktrack/bundle.hpp"
#include "flocktrack/config.hpp"
#include "flocktrack/csv_io.hpp"
#include "flocktrack/error.hpp"
#include "flocktrack/image.hpp"
#include "flocktrack/pipeline.hpp"
#include "flocktrack/simulator.hpp"

// After Eigen: <resolv.h> (pulled in here) defines a `_res` macro.
#include <httplib.h>

namespace flocktrack::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
  std::string config;
  std::string detections;
  std::string frames;
  std::string out;
  std::string gt;
  std::string gt_behavior;
  std::string media_url;
  bool verbose = false;
};

struct SimOptions {
  std::uint64_t seed = 1;
  int birds = 5;
  double seconds = 60.0;
  double fps = 30.0;
  int width = 1280;
  int height = 720;
  double miss_rate = 0.0;
  double fp_rate = 0.0;
  double jitter = 0.0;
  std::vector<std::string> swaps;
  std::vector<std::string> occlusions;
  std::vector<std::string> head_occlusions;
  bool no_frames = false;
};

struct EvalOptions {
  std::string bundle;
  std::string tracks;
};

struct ServeOptions {
  std::string dir = ".";
  std::string host = "127.0.0.1";
  int port = 8080;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "cannot create directory " + dir.string());
  }
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw Error(ErrorCode::kInput, std::string("--") + what + " is required");
  if (!fs::is_regular_file(path)) {
    throw Error(ErrorCode::kInput, std::string(what) + " file not found: " + path);
  }
}

// "a:b:c" with three integers.
std::array<int, 3> parse_triple(const std::string& s, const char* flag) {
  std::array<int, 3> v{};
  const char* p = s.data();
  const char* end = s.data() + s.size();
  for (int i = 0; i < 3; ++i) {
    const auto r = std::from_chars(p, end, v[i]);
    if (r.ec != std::errc()) {
      throw Error(ErrorCode::kInput, std::string(flag) + ": expected A:B:C integers, got '" + s + "'");
    }
    p = r.ptr;
    if (i < 2) {
      if (p == end || *p != ':') {
        throw Error(ErrorCode::kInput, std::string(flag) + ": expected A:B:C integers, got '" + s + "'");
      }
      ++p;
    }
  }
  if (p != end) {
    throw Error(ErrorCode::kInput, std::string(flag) + ": trailing characters in '" + s + "'");
  }
  return v;
}

// Config file (if any) with path flags layered on top. Relative paths in
// the config file are taken relative to the file's directory.
PipelineConfig resolve_config(CommonOptions& o) {
  PipelineConfig cfg;
  if (!o.config.empty()) {
    require_file(o.config, "config");
    cfg = load_config(o.config);
    const fs::path base = fs::path(o.config).parent_path();
    auto pick = [&](std::string& flag, const std::string& from_cfg) {
      if (flag.empty() && !from_cfg.empty()) {
        const fs::path p(from_cfg);
        flag = (p.is_absolute() ? p : base / p).string();
      }
    };
    pick(o.detections, cfg.paths.detections);
    pick(o.frames, cfg.paths.frames);
    pick(o.out, cfg.paths.out);
    pick(o.gt, cfg.paths.gt);
    pick(o.gt_behavior, cfg.paths.gt_behavior);
  }
  cfg.validate();
  return cfg;
}

void write_table_csv(const fs::path& path, const AnalysisBundle& b) {
  std::ostringstream s;
  s << "t,track_id,x,y,w,h\n";
  for (const TableRow& r : b.table) {
    s << r.t << ',' << r.track_id << ',' << format_double(r.x) << ',' << format_double(r.y)
      << ',' << format_double(r.w) << ',' << format_double(r.h) << '\n';
  }
  write_text(path, s.str());
}

void write_summary_csv(const fs::path& path, const AnalysisBundle& b) {
  std::ostringstream s;
  s << "track_id,kind,count,total_s,mean_s\n";
  for (const auto& [key, st] : b.summary) {
    s << key.first << ',' << to_string(key.second) << ',' << st.count << ','
      << format_double(st.total_s) << ',' << format_double(st.mean_s) << '\n';
  }
  write_text(path, s.str());
}

void write_media_json(const fs::path& dir, const std::string& url) {
  write_text(dir / "media.json", json{{"video_url", url}}.dump(2) + "\n");
}

void write_report(const fs::path& dir, const ClipScore& score) {
  write_text(dir / "report.json", score_to_json(score) + "\n");
  write_text(dir / "report.txt", format_report(score));
}

AnalysisBundle run_tracking(const PipelineConfig& cfg, const CommonOptions& o,
                            std::ostream& err) {
  require_file(o.detections, "detections");
  const DetectionFile dets = read_detection_csv(o.detections);
  for (const std::string& w : dets.warnings) err << "warning: " << w << '\n';

  std::unique_ptr<PngFrameSource> frames;
  if (cfg.needs_frames()) {
    if (o.frames.empty()) {
      throw Error(ErrorCode::kInput,
                  "--frames is required when appearance or head tracking is enabled");
    }
    frames = std::make_unique<PngFrameSource>(o.frames);
  }
  ProgressFn progress;
  if (o.verbose) {
    progress = [&err](int f, int n) {
      if ((f + 1) % 300 == 0 || f + 1 == n) err << "frame " << f + 1 << "/" << n << '\n';
    };
  }
  return run_pipeline(cfg, dets.detections, frames.get(), progress);
}

std::optional<ClipScore> score_if_requested(const AnalysisBundle& bundle,
                                            const PipelineConfig& cfg,
                                            const CommonOptions& o) {
  if (o.gt.empty()) {
    if (!o.gt_behavior.empty()) {
      throw Error(ErrorCode::kInput, "--gt-behavior needs --gt for the id mapping");
    }
    return std::nullopt;
  }
  require_file(o.gt, "gt");
  const DetectionFile gt = read_detection_csv(o.gt);
  if (!gt.has_ids) throw Error(ErrorCode::kInput, o.gt + ": ground truth needs an id column");
  std::vector<BehaviorEvent> gt_behavior;
  if (!o.gt_behavior.empty()) {
    require_file(o.gt_behavior, "gt-behavior");
    gt_behavior = read_behavior_csv(o.gt_behavior, bundle.video.fps);
  }
  return evaluate(bundle, gt.records(), o.gt_behavior.empty() ? nullptr : &gt_behavior, cfg);
}

int cmd_track(CommonOptions o, bool bundle_only, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = resolve_config(o);
  if (o.out.empty()) throw Error(ErrorCode::kInput, "--out is required");
  AnalysisBundle bundle = run_tracking(cfg, o, err);
  const fs::path dir(o.out);
  ensure_dir(dir);

  int status = kExitOk;
  if (!bundle_only) {
    // Scoring problems must not cost the user the tracking result.
    try {
      bundle.score = score_if_requested(bundle, cfg, o);
    } catch (const Error& e) {
      if (!e.is_input_error()) throw;
      err << "error: " << e.what() << " (bundle exported without scores)\n";
      status = kExitInput;
    }
  }
  export_bundle(bundle, dir / "bundle.json");
  if (!o.media_url.empty()) write_media_json(dir, o.media_url);
  if (!bundle_only) {
    write_track_csv(dir / "tracks.csv", bundle_records(bundle, cfg.head.patch_size));
    write_table_csv(dir / "table.csv", bundle);
    write_behavior_csv(dir / "events.csv", bundle.events, bundle.video.fps);
    write_summary_csv(dir / "summary.csv", bundle);
    if (bundle.score) {
      write_report(dir, *bundle.score);
      out << format_report(*bundle.score);
    }
  }
  if (o.verbose) {
    err << "tracks " << bundle.tracks.size() << ", events " << bundle.events.size()
        << ", wrote " << (dir / "bundle.json").string() << '\n';
  }
  return status;
}

int cmd_simulate(CommonOptions o, const SimOptions& s, std::ostream& err) {
  if (o.out.empty()) throw Error(ErrorCode::kInput, "--out is required");
  SimConfig sc;
  sc.seed = s.seed;
  sc.n_birds = s.birds;
  sc.clip_s = s.seconds;
  sc.video = {s.width, s.height, s.fps};
  if (!o.config.empty()) {
    const PipelineConfig pc = resolve_config(o);
    sc.video = pc.video;
    sc.layout = pc.layout;
  }
  sc.corruption.miss_rate = s.miss_rate;
  sc.corruption.fp_rate = s.fp_rate;
  sc.corruption.jitter_sigma = s.jitter;
  for (const std::string& t : s.swaps) {
    const auto v = parse_triple(t, "--swap");
    sc.corruption.swaps.push_back({v[0], v[1], v[2]});
  }
  for (const std::string& t : s.occlusions) {
    const auto v = parse_triple(t, "--occlude");
    sc.corruption.occlusions.push_back({v[0], v[1], v[2]});
  }
  for (const std::string& t : s.head_occlusions) {
    const auto v = parse_triple(t, "--occlude-head");
    sc.corruption.head_occlusions.push_back({v[0], v[1], v[2]});
  }
  sc.validate();
  const SimOutput sim = simulate(sc);

  const fs::path dir(o.out);
  ensure_dir(dir);
  write_detection_csv(dir / "detections.csv", sim.detections);
  write_track_csv(dir / "gt.csv", sim.ground_truth);
  write_behavior_csv(dir / "gt_behavior.csv", sim.behavior, sc.video.fps);
  write_track_csv(dir / "hypotheses.csv", sim.hypotheses);

  PipelineConfig pc;
  pc.video = sim.config.video;
  pc.layout = sim.config.layout;
  pc.frame_count = sim.frame_count();
  pc.metrics.skip_frames = pc.motion.confirm_hits - 1;
  pc.paths.detections = "detections.csv";
  pc.paths.gt = "gt.csv";
  pc.paths.gt_behavior = "gt_behavior.csv";
  if (s.no_frames) {
    pc.appearance.enabled = false;
    pc.head.enabled = false;
  } else {
    pc.paths.frames = "frames";
  }
  save_config(dir / "config.json", pc);

  const InjectedCounts& n = sim.injected;
  json meta = {{"seed", sc.seed},
               {"n_birds", sc.n_birds},
               {"clip_s", sc.clip_s},
               {"frame_count", sim.frame_count()},
               {"injected",
                {{"objects", n.objects},
                 {"misses", n.misses},
                 {"false_positives", n.false_positives},
                 {"mismatches", n.mismatches},
                 {"matches", n.matches},
                 {"jitter_sum", n.jitter_sum}}}};
  if (n.objects > 0) meta["expected_mota"] = n.expected_mota();
  if (n.matches > 0) meta["expected_motp"] = n.expected_motp();
  write_text(dir / "sim_meta.json", meta.dump(2) + "\n");

  if (!s.no_frames) {
    const fs::path frames = dir / "frames";
    ensure_dir(frames);
    const RgbImage background = render_background(sim.config);
    for (int f = 0; f < sim.frame_count(); ++f) {
      write_png(frames / frame_filename(f), render_frame(sim, f, &background));
      if (o.verbose && ((f + 1) % 300 == 0 || f + 1 == sim.frame_count())) {
        err << "rendered " << f + 1 << "/" << sim.frame_count() << '\n';
      }
    }
  }
  return kExitOk;
}

int cmd_eval(CommonOptions o, const EvalOptions& e, std::ostream& out) {
  const PipelineConfig cfg = resolve_config(o);
  if (e.bundle.empty() == e.tracks.empty()) {
    throw Error(ErrorCode::kInput, "give exactly one of --bundle or --tracks");
  }
  if (o.gt.empty()) throw Error(ErrorCode::kInput, "--gt is required");
  AnalysisBundle bundle;
  if (!e.bundle.empty()) {
    require_file(e.bundle, "bundle");
    bundle = import_bundle(e.bundle);
  } else {
    require_file(e.tracks, "tracks");
    const DetectionFile hyp = read_detection_csv(e.tracks);
    if (!hyp.has_ids) throw Error(ErrorCode::kInput, e.tracks + ": tracks need an id column");
    const std::vector<TrackRecord> records = hyp.records();
    std::vector<HeadRecord> heads;
    int frame_count = cfg.frame_count;
    for (const TrackRecord& r : records) {
      frame_count = std::max(frame_count, r.frame + 1);
      if (r.head) heads.push_back({r.frame, r.track_id, r.head->center(), HeadStatus::kTracked});
    }
    bundle = assemble_bundle(cfg.video, frame_count, cfg.layout, records, heads, {});
  }
  const ClipScore score = *score_if_requested(bundle, cfg, o);
  if (!o.out.empty()) {
    ensure_dir(o.out);
    write_report(o.out, score);
  }
  out << format_report(score);
  return kExitOk;
}

int cmd_serve(const ServeOptions& s, std::ostream& out) {
  if (!fs::is_directory(s.dir)) throw Error(ErrorCode::kInput, "directory not found: " + s.dir);
  StaticServer server(s.dir);
  const int port = server.bind(s.host, s.port);
  out << "serving " << s.dir << " at http://" << s.host << ':' << port << "/" << std::endl;
  server.listen();
  return kExitOk;
}

void add_common(CLI::App* app, CommonOptions& o, bool detections, bool frames, bool gt) {
  app->add_option("--config", o.config, "Pipeline config JSON");
  if (detections) app->add_option("--detections", o.detections, "Detection CSV");
  if (frames) app->add_option("--frames", o.frames, "Directory of frame_%06d.png images");
  app->add_option("--out", o.out, "Output directory");
  if (gt) {
    app->add_option("--gt", o.gt, "Ground-truth track CSV");
    app->add_option("--gt-behavior", o.gt_behavior, "Ground-truth behavior CSV");
  }
  app->add_flag("--verbose,-v", o.verbose, "Progress on stderr");
}

}  // namespace

struct StaticServer::Impl {
  httplib::Server server;
  fs::path dir;
};

StaticServer::StaticServer(fs::path dir) : impl_(std::make_unique<Impl>()) {
  impl_->dir = std::move(dir);
  if (!impl_->server.set_mount_point("/", impl_->dir.string())) {
    throw Error(ErrorCode::kInput, "cannot serve " + impl_->dir.string());
  }
  impl_->server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  impl_->server.set_file_extension_and_mimetype_mapping("json", "application/json");
  impl_->server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, HEAD, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "*");
    res.status = 204;
  });
}

StaticServer::~StaticServer() { stop(); }

int StaticServer::bind(const std::string& host, int port) {
  int bound = -1;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    bound = port;
  }
  if (bound < 0) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void StaticServer::listen() { impl_->server.listen_after_bind(); }

void StaticServer::stop() {
  if (impl_) impl_->server.stop();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-animal pen video tracking and behavior analytics"};
  app.require_subcommand(1);

  CommonOptions common;
  SimOptions sim;
  EvalOptions ev;
  ServeOptions serve;

  CLI::App* track = app.add_subcommand("track", "Run tracking, head tracking and behavior detection");
  add_common(track, common, true, true, true);
  track->add_option("--media-url", common.media_url, "Video URL recorded in media.json");

  CLI::App* exp = app.add_subcommand("export", "Run the pipeline and write bundle.json only");
  add_common(exp, common, true, true, false);
  exp->add_option("--media-url", common.media_url, "Video URL recorded in media.json");

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic clip");
  add_common(simulate_cmd, common, false, false, false);
  simulate_cmd->add_option("--seed", sim.seed, "Random seed");
  simulate_cmd->add_option("--birds", sim.birds, "Number of birds")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seconds", sim.seconds, "Clip length in seconds")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--fps", sim.fps, "Frame rate")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--width", sim.width, "Frame width")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--height", sim.height, "Frame height")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--miss-rate", sim.miss_rate, "Per object-frame miss probability");
  simulate_cmd->add_option("--fp-rate", sim.fp_rate, "Per-frame false positive probability");
  simulate_cmd->add_option("--jitter", sim.jitter, "Box center jitter sigma (px)");
  simulate_cmd->add_option("--swap", sim.swaps, "Label swap FRAME:A:B (repeatable)");
  simulate_cmd->add_option("--occlude", sim.occlusions, "Hide bird BIRD:START:END (repeatable)");
  simulate_cmd->add_option("--occlude-head", sim.head_occlusions,
                           "Paint head in body color BIRD:START:END (repeatable)");
  simulate_cmd->add_flag("--no-frames", sim.no_frames, "Skip rendering PNG frames");

  CLI::App* eval_cmd = app.add_subcommand("eval", "Score a bundle or track CSV against ground truth");
  add_common(eval_cmd, common, false, false, true);
  eval_cmd->add_option("--bundle", ev.bundle, "bundle.json from track/export");
  eval_cmd->add_option("--tracks", ev.tracks, "Track CSV with an id column");

  CLI::App* serve_cmd = app.add_subcommand("serve", "Serve a bundle directory over HTTP");
  serve_cmd->add_option("--dir", serve.dir, "Directory to serve");
  serve_cmd->add_option("--host", serve.host, "Bind address");
  serve_cmd->add_option("--port", serve.port, "Port, 0 for any free port")
      ->check(CLI::Range(0, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*track) return cmd_track(common, false, out, err);
    if (*exp) return cmd_track(common, true, out, err);
    if (*simulate_cmd) return cmd_simulate(common, sim, err);
    if (*eval_cmd) return cmd_eval(common, ev, out);
    if (*serve_cmd) return cmd_serve(serve, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_input_error() ? kExitInput : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitInput;
}

}  // namespace flocktrack::cli
