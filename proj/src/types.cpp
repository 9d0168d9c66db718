// SPDX-License-Identifier: Apache-2.0
#include "flocktrack/types.hpp"

#include <algorithm>
#include <cmath>

#include "flocktrack/error.hpp"

namespace flocktrack {

namespace {

constexpr double kBoundaryEps = 1e-9;

double segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  }
  return distance(p, {a.x + t * dx, a.y + t * dy});
}

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool BoundingBox::valid() const {
  return std::isfinite(cx) && std::isfinite(cy) && std::isfinite(w) &&
         std::isfinite(h) && w > 0.0 && h > 0.0;
}

bool BoundingBox::contains(Point p) const {
  return p.x >= left() && p.x <= right() && p.y >= top() && p.y <= bottom();
}

BoundingBox BoundingBox::dilated(double fraction) const {
  return {cx, cy, w * (1.0 + 2.0 * fraction), h * (1.0 + 2.0 * fraction)};
}

BoundingBox BoundingBox::from_corners(double x0, double y0, double x1,
                                      double y1) {
  return {0.5 * (x0 + x1), 0.5 * (y0 + y1), x1 - x0, y1 - y0};
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw =
      std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double ih =
      std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  // Identical boxes must give exactly 1.
  if (inter >= uni) return 1.0;
  return inter / uni;
}

double polygon_area(std::span<const Point> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % n];
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * std::abs(twice);
}

Point polygon_centroid(std::span<const Point> poly) {
  const std::size_t n = poly.size();
  double a = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % n];
    const double cross = p.x * q.y - q.x * p.y;
    a += cross;
    cx += (p.x + q.x) * cross;
    cy += (p.y + q.y) * cross;
  }
  if (a == 0.0) {
    Point mean;
    for (const Point& p : poly) {
      mean.x += p.x / static_cast<double>(n);
      mean.y += p.y / static_cast<double>(n);
    }
    return mean;
  }
  return {cx / (3.0 * a), cy / (3.0 * a)};
}

double distance_to_boundary(Point p, std::span<const Point> poly) {
  double best = INFINITY;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    best = std::min(best,
                    segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  }
  return best;
}

bool is_convex(std::span<const Point> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    const Point& c = poly[(i + 2) % n];
    const double cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
    if (cross == 0.0) continue;
    const int s = cross > 0.0 ? 1 : -1;
    if (sign == 0) {
      sign = s;
    } else if (s != sign) {
      return false;
    }
  }
  return sign != 0;
}

bool point_in_polygon(Point p, std::span<const Point> poly) {
  if (poly.size() < 3) return false;
  if (distance_to_boundary(p, poly) <= kBoundaryEps) return true;
  // Even-odd crossing test for strictly interior points.
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

void PenLayout::validate() const {
  if (!(pen_bounds.x1 > pen_bounds.x0 && pen_bounds.y1 > pen_bounds.y0)) {
    throw Error(ErrorCode::kConfig, "pen_bounds must have positive extent");
  }
  auto check = [&](const Polygon& poly, const char* name) {
    if (poly.empty()) return;
    if (poly.size() < 3 || polygon_area(poly) <= 0.0) {
      throw Error(ErrorCode::kConfig,
                  std::string(name) + " polygon is degenerate");
    }
    if (!is_convex(poly)) {
      throw Error(ErrorCode::kConfig, std::string(name) + " polygon is not convex");
    }
    for (const Point& v : poly) {
      if (!pen_bounds.contains(v)) {
        throw Error(ErrorCode::kConfig,
                    std::string(name) + " polygon leaves pen_bounds");
      }
    }
  };
  check(feeder, "feeder");
  check(drinker, "drinker");
}

}  // namespace flocktrack
