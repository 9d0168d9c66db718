// SPDX-License-Identifier: Apache-2.0
//
// JSON helpers shared by the config and bundle codecs.

#pragma once

#include <initializer_list>
#include <string>

#include <json.hpp>

#include "flocktrack/error.hpp"
#include "flocktrack/types.hpp"

namespace flocktrack::detail {

using nlohmann::json;

// Rejects keys outside `allowed`.
void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where);

template <class T>
void read_key(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kConfig, where + "." + key + ": wrong type");
  }
}

json polygon_to_json(const Polygon& poly);
Polygon polygon_from_json(const json& j, const std::string& where);
json layout_to_json(const PenLayout& layout);
PenLayout layout_from_json(const json& j, const VideoMeta& video, const std::string& where);

}  // namespace flocktrack::detail
