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
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "weldqa/dataset.hpp"
#include "weldqa/error.hpp"

namespace weldqa {

// Pixel to millimeter scale of the inspection camera.
struct Calibration {
  double px_per_mm = 40.0;

  void validate() const {
    if (!(px_per_mm > 0.0) || !std::isfinite(px_per_mm)) {
      throw InvalidArgument("px_per_mm must be positive");
    }
  }
};

// How a box is reduced to one pore size.
enum class SizeMeasure { kLongerSide, kShorterSide, kSqrtArea };

inline SizeMeasure parse_size_measure(std::string_view s) {
  if (s == "longer") return SizeMeasure::kLongerSide;
  if (s == "shorter") return SizeMeasure::kShorterSide;
  if (s == "sqrt-area") return SizeMeasure::kSqrtArea;
  throw InvalidArgument("unknown size measure '" + std::string(s) +
                        "' (expected longer, shorter or sqrt-area)");
}

inline double pore_size_mm(const Detection& d, const Calibration& c = {},
                           SizeMeasure measure = SizeMeasure::kLongerSide) {
  c.validate();
  const double w = d.box.width(), h = d.box.height();
  double px = 0.0;
  switch (measure) {
    case SizeMeasure::kLongerSide:
      px = std::max(w, h);
      break;
    case SizeMeasure::kShorterSide:
      px = std::min(w, h);
      break;
    case SizeMeasure::kSqrtArea:
      px = std::sqrt(w * h);
      break;
  }
  return px / c.px_per_mm;
}

enum class Decision { kAccept, kReject, kNoDetection };

inline std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::kAccept:
      return "accept";
    case Decision::kReject:
      return "reject";
    case Decision::kNoDetection:
      return "no-detection";
  }
  return "?";
}

struct Verdict {
  std::string image_id;
  Decision decision = Decision::kNoDetection;
  double largest_pore_mm = 0.0;
  // Largest pore among the detections that were considered.
  std::optional<Detection> largest;
  double threshold_mm = 0.0;
};

struct AssessOptions {
  double threshold_mm = 0.0;  // required, no default
  double min_score = 0.0;
  Calibration calibration;
  SizeMeasure measure = SizeMeasure::kLongerSide;

  void validate() const {
    if (!(threshold_mm > 0.0)) throw InvalidArgument("threshold_mm must be > 0");
    if (!(min_score >= 0.0 && min_score <= 1.0)) {
      throw InvalidArgument("min_score must lie in [0, 1]");
    }
    calibration.validate();
  }
};

// One verdict per image id, sorted by id. `image_ids` adds images that have
// no detections at all so they get a no-detection verdict. Among equally
// large pores the first in input order is reported.
inline std::vector<Verdict> assess(const std::vector<Detection>& dets,
                                   const AssessOptions& opts,
                                   const std::vector<std::string>& image_ids = {}) {
  opts.validate();
  std::map<std::string, Verdict> by_image;
  for (const auto& id : image_ids) by_image[id].image_id = id;
  for (const auto& d : dets) {
    Verdict& v = by_image[d.image_id];
    v.image_id = d.image_id;
    if (d.score < opts.min_score) continue;
    const double mm = pore_size_mm(d, opts.calibration, opts.measure);
    if (!v.largest || mm > v.largest_pore_mm) {
      v.largest = d;
      v.largest_pore_mm = mm;
    }
  }
  std::vector<Verdict> out;
  out.reserve(by_image.size());
  for (auto& [id, v] : by_image) {
    v.threshold_mm = opts.threshold_mm;
    if (!v.largest) {
      v.decision = Decision::kNoDetection;
      v.largest_pore_mm = 0.0;
    } else {
      v.decision = v.largest_pore_mm > opts.threshold_mm ? Decision::kReject
                                                         : Decision::kAccept;
    }
    out.push_back(std::move(v));
  }
  return out;
}

namespace detail {

// Shortest text that reads back to the same double.
inline std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

// CSV with header image_id,decision,largest_pore_mm,score,threshold_mm.
// score is empty for no-detection rows.
inline std::string verdicts_to_csv(const std::vector<Verdict>& verdicts) {
  std::ostringstream o;
  o << "image_id,decision,largest_pore_mm,score,threshold_mm\n";
  for (const auto& v : verdicts) {
    o << v.image_id << ',' << to_string(v.decision) << ','
      << detail::shortest(v.largest_pore_mm) << ',';
    if (v.largest) o << detail::shortest(v.largest->score);
    o << ',' << detail::shortest(v.threshold_mm) << '\n';
  }
  return o.str();
}

inline std::string verdict_summary(const std::vector<Verdict>& verdicts) {
  std::size_t accept = 0, reject = 0, none = 0;
  for (const auto& v : verdicts) {
    switch (v.decision) {
      case Decision::kAccept:
        ++accept;
        break;
      case Decision::kReject:
        ++reject;
        break;
      case Decision::kNoDetection:
        ++none;
        break;
    }
  }
  std::ostringstream o;
  o << verdicts.size() << " images: " << accept << " accept, " << reject
    << " reject, " << none << " no-detection\n";
  for (const auto& v : verdicts) {
    if (v.decision != Decision::kReject) continue;
    o << "  reject " << v.image_id << ": pore " << v.largest_pore_mm
      << " mm > " << v.threshold_mm << " mm\n";
  }
  return o.str();
}

}  // namespace weldqa
