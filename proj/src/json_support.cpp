// SPDX-License-Identifier: Apache-2.0
#include "json_support.hpp"

#include <algorithm>

namespace flocktrack::detail {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                [&](const char* a) { return key == a; });
    if (!ok) throw Error(ErrorCode::kConfig, where + ": unknown key '" + key + "'");
  }
}

json polygon_to_json(const Polygon& poly) {
  json out = json::array();
  for (const Point& p : poly) out.push_back({p.x, p.y});
  return out;
}

Polygon polygon_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw Error(ErrorCode::kConfig, where + ": expected [[x, y], ...]");
  Polygon poly;
  for (const json& v : j) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw Error(ErrorCode::kConfig, where + ": vertices must be [x, y] pairs");
    }
    poly.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  return poly;
}

json layout_to_json(const PenLayout& layout) {
  const Rect& b = layout.pen_bounds;
  return {{"bounds", {b.x0, b.y0, b.x1, b.y1}},
          {"feeder", polygon_to_json(layout.feeder)},
          {"drinker", polygon_to_json(layout.drinker)}};
}

PenLayout layout_from_json(const json& j, const VideoMeta& video, const std::string& where) {
  check_keys(j, {"bounds", "feeder", "drinker"}, where);
  PenLayout layout;
  layout.pen_bounds = {0.0, 0.0, static_cast<double>(video.width),
                       static_cast<double>(video.height)};
  if (j.contains("bounds")) {
    const json& b = j.at("bounds");
    if (!b.is_array() || b.size() != 4 ||
        !std::all_of(b.begin(), b.end(), [](const json& v) { return v.is_number(); })) {
      throw Error(ErrorCode::kConfig, where + ".bounds: expected [x0, y0, x1, y1]");
    }
    layout.pen_bounds = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                         b[3].get<double>()};
  }
  if (j.contains("feeder")) layout.feeder = polygon_from_json(j.at("feeder"), where + ".feeder");
  if (j.contains("drinker")) layout.drinker = polygon_from_json(j.at("drinker"), where + ".drinker");
  return layout;
}

}  // namespace flocktrack::detail
