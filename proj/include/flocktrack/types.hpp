// SPDX-License-Identifier: Apache-2.0
//
// Geometric and video domain types shared by every stage of the pipeline.
// Boxes are center-based (cx, cy, w, h) everywhere; corner forms only appear
// inside the functions that need them.

#pragma once

#include <optional>
#include <span>
#include <vector>

namespace flocktrack {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b);

struct BoundingBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  double left() const { return cx - 0.5 * w; }
  double right() const { return cx + 0.5 * w; }
  double top() const { return cy - 0.5 * h; }
  double bottom() const { return cy + 0.5 * h; }
  double area() const { return w * h; }
  Point center() const { return {cx, cy}; }

  bool valid() const;
  bool contains(Point p) const;
  // Grows each side by `fraction` of the corresponding extent.
  BoundingBox dilated(double fraction) const;
  static BoundingBox from_corners(double x0, double y0, double x1, double y1);

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Detection {
  int frame = 0;
  BoundingBox box;
  double confidence = 1.0;
  // Manual head initialization carried by first-frame rows of the input.
  std::optional<BoundingBox> head_init;
};

struct VideoMeta {
  int width = 1280;
  int height = 720;
  double fps = 30.0;

  bool valid() const { return width > 0 && height > 0 && fps > 0.0; }

  friend bool operator==(const VideoMeta&, const VideoMeta&) = default;
};

struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  bool contains(Point p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

using Polygon = std::vector<Point>;

double polygon_area(std::span<const Point> poly);
Point polygon_centroid(std::span<const Point> poly);
// Euclidean distance from `p` to the polygon outline (0 on the boundary).
double distance_to_boundary(Point p, std::span<const Point> poly);
bool is_convex(std::span<const Point> poly);

struct PenLayout {
  Polygon feeder;
  Polygon drinker;
  Rect pen_bounds;

  bool empty() const { return feeder.empty() && drinker.empty(); }
  // Throws kConfig when a fixture is degenerate or leaves the pen.
  void validate() const;

  friend bool operator==(const PenLayout&, const PenLayout&) = default;
};

struct TrackRecord {
  int frame = 0;
  int track_id = 0;
  BoundingBox box;
  std::optional<BoundingBox> head;

  friend bool operator==(const TrackRecord&, const TrackRecord&) = default;
};

// Intersection over union of two valid boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

// Inside-or-on-boundary test; works for any simple polygon.
bool point_in_polygon(Point p, std::span<const Point> poly);

}  // namespace flocktrack
