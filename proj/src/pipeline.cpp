// SPDX-License-Identifier: Apache-2.0
#include "flocktrack/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "flocktrack/association.hpp"
#include "flocktrack/error.hpp"
#include "flocktrack/simulator.hpp"

namespace flocktrack {

PngFrameSource::PngFrameSource(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_)) {
    throw Error(ErrorCode::kInput, "frames directory not found: " + dir_.string());
  }
}

RgbImage PngFrameSource::frame(int index) const {
  const std::filesystem::path path = dir_ / frame_filename(index);
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kInput, "missing frame image " + path.string());
  }
  return read_png(path);
}

SimFrameSource::SimFrameSource(const SimOutput& sim)
    : sim_(sim), background_(render_background(sim.config)) {}

RgbImage SimFrameSource::frame(int index) const {
  return render_frame(sim_, index, &background_);
}

Tracker::Tracker(PipelineConfig cfg, std::unique_ptr<AppearanceExtractor> extractor)
    : cfg_(std::move(cfg)), extractor_(std::move(extractor)) {
  if (!extractor_) extractor_ = std::make_unique<HistogramExtractor>(cfg_.appearance);
}

void Tracker::step(int frame_index, std::span<const Detection> detections,
                   const RgbImage* image) {
  if (cfg_.needs_frames() && image == nullptr) {
    throw Error(ErrorCode::kInput, "a frame image is required when appearance or head "
                                   "tracking is enabled");
  }
  const MotionConfig& motion = cfg_.motion;
  for (Track& t : tracks_) t = predict(std::move(t), motion);

  std::vector<AppearanceFeature> features;
  if (cfg_.appearance.enabled) {
    features.reserve(detections.size());
    for (const Detection& d : detections) features.push_back(extractor_->extract(*image, d.box));
  }

  const AssignmentResult m = matching_cascade(tracks_, detections, features, motion.max_age,
                                              cfg_.association, motion);
  for (const auto& [ti, di] : m.matches) {
    Track& t = tracks_[ti];
    const Detection& det = detections[di];
    const Point before = t.last_box.center();
    t = update(std::move(t), det, motion);
    if (!features.empty()) t.gallery.push(features[di]);
    if (t.head && cfg_.head.enabled) {
      if (cfg_.head.follow_body) {
        t.head->current_center.x += det.box.cx - before.x;
        t.head->current_center.y += det.box.cy - before.y;
      }
      if (t.confirmed()) {
        t.head = step_head(std::move(*t.head), *image, det.box, frame_index,
                           cfg_.video.fps, cfg_.head);
      }
    }
  }
  for (int ti : m.unmatched_rows) tracks_[ti] = mark_missed(std::move(tracks_[ti]), motion.max_age);
  for (int di : m.unmatched_cols) {
    const Detection& det = detections[di];
    Track t = initiate(det, next_id_++, motion, cfg_.appearance.gallery_budget);
    if (!features.empty()) t.gallery.push(features[di]);
    if (cfg_.head.enabled && det.head_init) {
      t.head = init_head(*image, *det.head_init, frame_index, cfg_.head);
    }
    tracks_.push_back(std::move(t));
  }
  std::erase_if(tracks_, [](const Track& t) { return t.deleted(); });

  // Ids grow with creation order, so tracks_ is already sorted by id.
  const double patch = cfg_.head.patch_size;
  for (const Track& t : tracks_) {
    if (!t.confirmed() || t.lifecycle.time_since_update != 0) continue;
    TrackRecord r{frame_index, t.id, t.last_box, std::nullopt};
    if (t.head) {
      if (t.head->status == HeadStatus::kTracked) {
        r.head = BoundingBox{t.head->current_center.x, t.head->current_center.y, patch, patch};
      }
      heads_.push_back({frame_index, t.id, t.head->current_center, t.head->status});
    }
    records_.push_back(r);
  }
}

std::vector<BehaviorEvent> detect_behaviors(const PipelineConfig& cfg,
                                            const std::vector<TrackRecord>& records,
                                            const std::vector<HeadRecord>& heads) {
  std::map<int, std::vector<const TrackRecord*>> by_track;
  for (const TrackRecord& r : records) by_track[r.track_id].push_back(&r);
  std::map<std::pair<int, int>, const HeadRecord*> head_at;
  for (const HeadRecord& h : heads) head_at[{h.track_id, h.frame}] = &h;

  const double fps = cfg.video.fps;
  std::vector<BehaviorEvent> events;
  for (auto& [id, recs] : by_track) {
    std::sort(recs.begin(), recs.end(),
              [](const TrackRecord* a, const TrackRecord* b) { return a->frame < b->frame; });
    std::vector<TrajectoryPoint> traj;
    std::vector<ProximitySample> samples;
    double height_sum = 0.0;
    for (const TrackRecord* r : recs) {
      traj.push_back({r->frame, r->box.center()});
      height_sum += r->box.h;
      ProximitySample s{r->frame, std::nullopt, r->box};
      const auto h = head_at.find({id, r->frame});
      if (h != head_at.end() && h->second->status == HeadStatus::kTracked) {
        s.head = h->second->center;
      }
      samples.push_back(s);
    }
    const double body_height = height_sum / static_cast<double>(recs.size());
    for (const BehaviorEvent& e : detect_walking(traj, id, fps, cfg.behavior, body_height)) {
      events.push_back(e);
    }
    if (!cfg.layout.empty()) {
      for (const BehaviorEvent& e : detect_feeding(samples, id, cfg.layout, fps, cfg.behavior)) {
        events.push_back(e);
      }
    }
  }
  return events;
}

AnalysisBundle run_pipeline(const PipelineConfig& cfg, std::span<const Detection> detections,
                            const FrameSource* frames, const ProgressFn& progress) {
  cfg.validate();
  if (cfg.needs_frames() && frames == nullptr) {
    throw Error(ErrorCode::kInput,
                "frames are required when appearance or head tracking is enabled");
  }
  int frame_count = cfg.frame_count;
  if (frame_count == 0) {
    for (const Detection& d : detections) frame_count = std::max(frame_count, d.frame + 1);
  }

  VideoMeta meta = cfg.video;
  Tracker tracker(cfg);
  std::size_t i = 0;
  for (int f = 0; f < frame_count; ++f) {
    while (i < detections.size() && detections[i].frame < f) ++i;
    std::size_t j = i;
    while (j < detections.size() && detections[j].frame == f) ++j;
    try {
      RgbImage image;
      if (cfg.needs_frames()) {
        image = frames->frame(f);
        if (f == 0) {
          meta.width = image.width();
          meta.height = image.height();
        }
      }
      tracker.step(f, detections.subspan(i, j - i), cfg.needs_frames() ? &image : nullptr);
    } catch (const Error& e) {
      throw Error(e.code(), "frame " + std::to_string(f) + ": " + e.what());
    }
    i = j;
    if (progress) progress(f, frame_count);
  }

  std::vector<BehaviorEvent> events =
      detect_behaviors(cfg, tracker.records(), tracker.head_records());
  return assemble_bundle(meta, frame_count, cfg.layout, tracker.records(),
                         tracker.head_records(), std::move(events));
}

ClipScore evaluate(const AnalysisBundle& bundle, std::span<const TrackRecord> gt,
                   const std::vector<BehaviorEvent>* gt_behavior, const PipelineConfig& cfg) {
  const int skip = cfg.metrics.skip_frames;
  std::vector<TrackRecord> g, h;
  for (const TrackRecord& r : gt) {
    if (r.frame >= skip) g.push_back(r);
  }
  for (const TrackRecord& r : bundle_records(bundle, cfg.head.patch_size)) {
    if (r.frame >= skip) h.push_back(r);
  }

  ClipScore score;
  score.body = evaluate_tracks(g, h, cfg.metrics.match_radius);
  const bool gt_heads =
      std::any_of(g.begin(), g.end(), [](const TrackRecord& r) { return r.head.has_value(); });
  if (gt_heads && !bundle.heads.empty()) {
    score.head = evaluate_tracks(g, h, cfg.metrics.match_radius, true);
  }

  if (gt_behavior != nullptr) {
    std::vector<BehaviorEvent> hyp = bundle.events;
    for (BehaviorEvent& e : hyp) {
      const auto it = score.body->hyp_to_gt.find(e.track_id);
      // Unmapped tracks cannot match any ground-truth id.
      e.track_id = it != score.body->hyp_to_gt.end() ? it->second : -e.track_id;
    }
    for (BehaviorKind kind : {BehaviorKind::kWalking, BehaviorKind::kEating,
                              BehaviorKind::kDrinking}) {
      std::vector<BehaviorEvent> gk, hk;
      std::copy_if(gt_behavior->begin(), gt_behavior->end(), std::back_inserter(gk),
                   [&](const BehaviorEvent& e) { return e.kind == kind; });
      std::copy_if(hyp.begin(), hyp.end(), std::back_inserter(hk),
                   [&](const BehaviorEvent& e) { return e.kind == kind; });
      score.behavior[kind] = match_events(gk, hk, cfg.video.fps);
    }
  }
  return score;
}

std::string format_report(const ClipScore& score) {
  std::string out;
  char line[256];
  auto mot = [&](const char* name, const MotSummary& s) {
    std::snprintf(line, sizeof(line),
                  "%-8s MOTA %8.4f  MOTP %8.3f px  misses %ld  fp %ld  mismatches %ld  "
                  "objects %ld\n",
                  name, s.mota.value_or(0.0), s.motp.value_or(0.0), s.misses,
                  s.false_positives, s.mismatches, s.objects);
    out += line;
  };
  if (score.body) mot("body", *score.body);
  if (score.head) mot("head", *score.head);
  for (const auto& [kind, r] : score.behavior) {
    std::snprintf(line, sizeof(line),
                  "%-8s precision %.3f  recall %.3f  TP %d  I %d  D %d  mean IOU %.3f\n",
                  std::string(to_string(kind)).c_str(), r.precision, r.recall,
                  r.true_positives, r.insertions, r.deletions, r.mean_iou);
    out += line;
  }
  return out;
}

}  // namespace flocktrack
