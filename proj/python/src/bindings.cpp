// SPDX-License-Identifier: Apache-2.0
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <memory>
#include <sstream>

#include "cli.hpp"
#include "flocktrack/bundle.hpp"
#include "flocktrack/config.hpp"
#include "flocktrack/csv_io.hpp"
#include "flocktrack/error.hpp"
#include "flocktrack/metrics.hpp"
#include "flocktrack/pipeline.hpp"
#include "flocktrack/simulator.hpp"

namespace py = pybind11;
using namespace flocktrack;

namespace {

py::dict mot_dict(const MotSummary& s) {
  py::dict d;
  d["mota"] = s.mota;
  d["motp"] = s.motp;
  d["misses"] = s.misses;
  d["false_positives"] = s.false_positives;
  d["mismatches"] = s.mismatches;
  d["objects"] = s.objects;
  d["matches"] = s.matches;
  d["hyp_to_gt"] = s.hyp_to_gt;
  return d;
}

py::dict events_dict(const EventMatchReport& r) {
  py::dict d;
  d["true_positives"] = r.true_positives;
  d["insertions"] = r.insertions;
  d["deletions"] = r.deletions;
  d["precision"] = r.precision;
  d["recall"] = r.recall;
  d["mean_iou"] = r.mean_iou;
  d["pairs"] = r.pairs;
  return d;
}

py::array_t<std::uint8_t> to_array(const RgbImage& img) {
  py::array_t<std::uint8_t> a({img.height(), img.width(), 3});
  std::memcpy(a.mutable_data(), img.bytes().data(), img.bytes().size());
  return a;
}

// Keeps the frame source alive next to the clip it renders.
struct Clip {
  SimOutput sim;
  std::unique_ptr<SimFrameSource> frames;
};

std::shared_ptr<Clip> make_clip(SimConfig cfg) {
  auto clip = std::make_shared<Clip>();
  clip->sim = simulate(cfg);
  clip->frames = std::make_unique<SimFrameSource>(clip->sim);
  return clip;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-animal tracking, head tracking and behavior scoring";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  py::enum_<BehaviorKind>(m, "BehaviorKind")
      .value("WALKING", BehaviorKind::kWalking)
      .value("EATING", BehaviorKind::kEating)
      .value("DRINKING", BehaviorKind::kDrinking);

  py::class_<BoundingBox>(m, "BoundingBox")
      .def(py::init<double, double, double, double>(), py::arg("cx"), py::arg("cy"),
           py::arg("w"), py::arg("h"))
      .def_readwrite("cx", &BoundingBox::cx)
      .def_readwrite("cy", &BoundingBox::cy)
      .def_readwrite("w", &BoundingBox::w)
      .def_readwrite("h", &BoundingBox::h)
      .def(py::self == py::self)
      .def("__repr__", [](const BoundingBox& b) {
        std::ostringstream s;
        s << "BoundingBox(" << b.cx << ", " << b.cy << ", " << b.w << ", " << b.h << ")";
        return s.str();
      });

  py::class_<Detection>(m, "Detection")
      .def(py::init([](int frame, BoundingBox box, double conf) {
             return Detection{frame, box, conf, std::nullopt};
           }),
           py::arg("frame"), py::arg("box"), py::arg("confidence") = 1.0)
      .def_readwrite("frame", &Detection::frame)
      .def_readwrite("box", &Detection::box)
      .def_readwrite("confidence", &Detection::confidence)
      .def_readwrite("head_init", &Detection::head_init);

  py::class_<TrackRecord>(m, "TrackRecord")
      .def(py::init([](int frame, int id, BoundingBox box, std::optional<BoundingBox> head) {
             return TrackRecord{frame, id, box, head};
           }),
           py::arg("frame"), py::arg("track_id"), py::arg("box"), py::arg("head") = std::nullopt)
      .def_readwrite("frame", &TrackRecord::frame)
      .def_readwrite("track_id", &TrackRecord::track_id)
      .def_readwrite("box", &TrackRecord::box)
      .def_readwrite("head", &TrackRecord::head);

  py::class_<BehaviorEvent>(m, "BehaviorEvent")
      .def(py::init([](int id, BehaviorKind kind, int start, int end) {
             return BehaviorEvent{id, kind, start, end, false};
           }),
           py::arg("track_id"), py::arg("kind"), py::arg("start"), py::arg("end"))
      .def_readwrite("track_id", &BehaviorEvent::track_id)
      .def_readwrite("kind", &BehaviorEvent::kind)
      .def_readwrite("start", &BehaviorEvent::start)
      .def_readwrite("end", &BehaviorEvent::end)
      .def_readwrite("low_confidence", &BehaviorEvent::low_confidence);

  py::class_<Clip, std::shared_ptr<Clip>>(m, "SimulatedClip")
      .def_property_readonly("frame_count", [](const Clip& c) { return c.sim.frame_count(); })
      .def_property_readonly("fps", [](const Clip& c) { return c.sim.config.video.fps; })
      .def_property_readonly("detections", [](const Clip& c) { return c.sim.detections; })
      .def_property_readonly("ground_truth", [](const Clip& c) { return c.sim.ground_truth; })
      .def_property_readonly("hypotheses", [](const Clip& c) { return c.sim.hypotheses; })
      .def_property_readonly("behavior", [](const Clip& c) { return c.sim.behavior; })
      .def_property_readonly("expected_mota",
                             [](const Clip& c) { return c.sim.injected.expected_mota(); })
      .def("frame", [](const Clip& c, int i) { return to_array(c.frames->frame(i)); },
           py::arg("index"), "Rendered frame as an (H, W, 3) uint8 array.");

  m.def(
      "simulate",
      [](std::uint64_t seed, int n_birds, double seconds, double miss_rate, double fp_rate,
         double jitter) {
        SimConfig cfg;
        cfg.seed = seed;
        cfg.n_birds = n_birds;
        cfg.clip_s = seconds;
        cfg.corruption.miss_rate = miss_rate;
        cfg.corruption.fp_rate = fp_rate;
        cfg.corruption.jitter_sigma = jitter;
        return make_clip(cfg);
      },
      py::arg("seed") = 1, py::arg("n_birds") = 5, py::arg("seconds") = 60.0,
      py::arg("miss_rate") = 0.0, py::arg("fp_rate") = 0.0, py::arg("jitter") = 0.0);

  m.def("default_config", [] { return config_to_json(PipelineConfig{}); },
        "Default pipeline config as JSON text.");
  m.def("normalize_config", [](const std::string& text) { return config_to_json(parse_config(text)); },
        py::arg("config_json"), "Parse, validate and re-serialize a config.");

  m.def(
      "track",
      [](const std::vector<Detection>& detections, const std::string& config_json,
         std::optional<std::filesystem::path> frames_dir) {
        const PipelineConfig cfg = parse_config(config_json);
        std::unique_ptr<PngFrameSource> frames;
        if (frames_dir) frames = std::make_unique<PngFrameSource>(*frames_dir);
        py::gil_scoped_release release;
        return bundle_to_json(run_pipeline(cfg, detections, frames.get()));
      },
      py::arg("detections"), py::arg("config_json") = "{}", py::arg("frames_dir") = std::nullopt,
      "Run the pipeline and return the bundle as JSON text.");

  m.def(
      "track_clip",
      [](const Clip& clip, const std::string& config_json) {
        PipelineConfig cfg = parse_config(config_json);
        cfg.video = clip.sim.config.video;
        cfg.layout = clip.sim.config.layout;
        if (cfg.frame_count == 0) cfg.frame_count = clip.sim.frame_count();
        py::gil_scoped_release release;
        return bundle_to_json(run_pipeline(cfg, clip.sim.detections, clip.frames.get()));
      },
      py::arg("clip"), py::arg("config_json") = "{}",
      "Run the pipeline on a simulated clip, rendering frames on demand.");

  m.def(
      "evaluate_tracks",
      [](const std::vector<TrackRecord>& gt, const std::vector<TrackRecord>& hyp, double radius,
         bool heads) { return mot_dict(evaluate_tracks(gt, hyp, radius, heads)); },
      py::arg("gt"), py::arg("hyp"), py::arg("radius") = 50.0, py::arg("use_heads") = false);

  m.def(
      "evaluate_bundle",
      [](const std::string& bundle_json, const std::vector<TrackRecord>& gt, double radius,
         int skip_frames) {
        const AnalysisBundle b = bundle_from_json(bundle_json);
        std::vector<TrackRecord> g, h;
        for (const TrackRecord& r : gt) {
          if (r.frame >= skip_frames) g.push_back(r);
        }
        for (const TrackRecord& r : bundle_records(b)) {
          if (r.frame >= skip_frames) h.push_back(r);
        }
        return mot_dict(evaluate_tracks(g, h, radius));
      },
      py::arg("bundle_json"), py::arg("gt"), py::arg("radius") = 50.0, py::arg("skip_frames") = 0);

  m.def(
      "match_events",
      [](const std::vector<BehaviorEvent>& gt, const std::vector<BehaviorEvent>& hyp, double fps) {
        return events_dict(match_events(gt, hyp, fps));
      },
      py::arg("gt"), py::arg("hyp"), py::arg("fps"));

  m.def(
      "interval_iou",
      [](std::pair<double, double> a, std::pair<double, double> b) {
        return interval_iou({a.first, a.second}, {b.first, b.second});
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "read_detections",
      [](const std::filesystem::path& path) { return read_detection_csv(path).detections; },
      py::arg("path"));
  m.def(
      "read_tracks", [](const std::filesystem::path& path) { return read_detection_csv(path).records(); },
      py::arg("path"));

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "flocktrack");
        std::vector<const char*> argv;
        for (const std::string& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a CLI subcommand; returns (exit_code, stdout, stderr).");
}
