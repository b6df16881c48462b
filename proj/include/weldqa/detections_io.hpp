// Copyright 2026 The weldqa Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Detections file: UTF-8, one JSON object per line,
//   {"image_id": "img1", "label": "pore", "bbox": [x, y, w, h], "score": 0.9}
// bbox is x, y, width, height in pixels and is turned into corner form on
// load. Blank lines are skipped.
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "weldqa/dataset.hpp"
#include "weldqa/error.hpp"

namespace weldqa {

// Parses a detections stream. `source` names the stream in error messages.
// Records are numbered from 0 in the order they appear (blank lines do not
// count).
inline std::vector<Detection> parse_detections(std::istream& in,
                                               const std::string& source) {
  std::vector<Detection> out;
  std::string line;
  std::size_t record = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ": record " + std::to_string(record) +
                              " (line " + std::to_string(line_no) + ")";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw ParseError(where + ": record is not an object");
    const auto field = [&](const char* key) -> const nlohmann::json& {
      const auto it = j.find(key);
      if (it == j.end()) throw ParseError(where + ": missing field '" + key + "'");
      return *it;
    };
    const auto& id = field("image_id");
    const auto& label = field("label");
    const auto& bbox = field("bbox");
    const auto& score = field("score");
    if (!id.is_string() || !label.is_string()) {
      throw ParseError(where + ": image_id and label must be strings");
    }
    if (!bbox.is_array() || bbox.size() != 4 ||
        !std::all_of(bbox.begin(), bbox.end(),
                     [](const nlohmann::json& v) { return v.is_number(); })) {
      throw ParseError(where + ": bbox must be an array of four numbers");
    }
    if (!score.is_number()) throw ParseError(where + ": score must be a number");

    Detection d;
    d.image_id = id.get<std::string>();
    d.label = label.get<std::string>();
    if (d.label.empty()) throw ParseError(where + ": empty label");
    const double x = bbox[0].get<double>(), y = bbox[1].get<double>();
    const double w = bbox[2].get<double>(), h = bbox[3].get<double>();
    if (!(w >= 0.0) || !(h >= 0.0)) {
      throw ParseError(where + ": bbox width and height must be >= 0");
    }
    d.box = {x, y, x + w, y + h};
    if (!d.box.valid()) throw ParseError(where + ": bbox is not finite");
    d.score = score.get<double>();
    if (!(d.score >= 0.0 && d.score <= 1.0)) {
      throw ParseError(where + ": score " + score.dump() + " outside [0, 1]");
    }
    out.push_back(std::move(d));
    ++record;
  }
  return out;
}

inline std::vector<Detection> load_detections(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open detections file '" + file.string() + "'");
  return parse_detections(in, file.filename().string());
}

inline nlohmann::json detection_to_json(const Detection& d) {
  return {{"image_id", d.image_id},
          {"label", d.label},
          {"bbox", {d.box.x_min, d.box.y_min, d.box.width(), d.box.height()}},
          {"score", d.score}};
}

inline void write_detections(const std::vector<Detection>& dets, std::ostream& out) {
  for (const auto& d : dets) out << detection_to_json(d).dump() << '\n';
}

inline void write_detections(const std::vector<Detection>& dets,
                             const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write detections file '" + file.string() + "'");
  write_detections(dets, out);
  if (!out) throw IoError("write failed for '" + file.string() + "'");
}

}  // namespace weldqa
