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
// Serialization of evaluation results and run-to-run comparison tables.
#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "weldqa/coco_eval.hpp"
#include "weldqa/error.hpp"

namespace weldqa {

namespace detail {

// Shortest representation that reads back to the same double.
inline std::string num(double v) { return nlohmann::json(v).dump(); }

inline std::string fixed3(double v) {
  if (v <= kUndefinedMetric) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace detail

inline nlohmann::ordered_json eval_result_to_json(const EvalResult& r,
                                                  const std::string& run,
                                                  const EvalConfig& cfg) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["run"] = run;
  j["config"] = {{"iou_thresholds", cfg.iou_thresholds},
                 {"recall_points", cfg.recall_points},
                 {"max_dets", cfg.max_dets},
                 {"small_max_area", cfg.buckets.small_max_area},
                 {"large_min_area", cfg.buckets.large_min_area},
                 {"score_floor", cfg.score_floor}};
  j["labels"] = r.labels;
  ordered_json summary;
  summary["m_ap"] = r.m_ap;
  summary["ap_50"] = r.ap_50;
  summary["m_ar_100"] = r.m_ar_100;
  for (AreaRange a : kAreaRanges) {
    summary["m_ap_" + std::string(to_string(a))] = r.mean_ap(a);
    summary["m_ar_" + std::string(to_string(a))] = r.mean_ar(a);
  }
  j["summary"] = summary;
  ordered_json num_gt;
  for (AreaRange a : kAreaRanges) {
    num_gt[std::string(to_string(a))] = r.num_gt[static_cast<std::size_t>(a)];
  }
  j["num_gt"] = num_gt;
  j["ap"] = ordered_json::array();
  for (std::size_t t = 0; t < r.ap.size(); ++t) {
    ordered_json row;
    row["iou"] = r.iou_thresholds[t];
    for (AreaRange a : kAreaRanges) {
      row[std::string(to_string(a))] = r.ap[t][static_cast<std::size_t>(a)];
    }
    j["ap"].push_back(row);
  }
  j["ar"] = ordered_json::array();
  for (std::size_t m = 0; m < r.ar.size(); ++m) {
    ordered_json row;
    row["max_det"] = r.max_dets[m];
    for (AreaRange a : kAreaRanges) {
      row[std::string(to_string(a))] = r.ar[m][static_cast<std::size_t>(a)];
    }
    j["ar"].push_back(row);
  }
  j["unknown_images"] = r.unknown_images;
  return j;
}

struct NamedResult {
  std::string run;
  EvalResult result;
};

// Inverse of eval_result_to_json.
inline NamedResult eval_result_from_json(const nlohmann::json& j,
                                         const std::string& source) {
  try {
    NamedResult out;
    out.run = j.at("run").get<std::string>();
    EvalResult& r = out.result;
    r.labels = j.at("labels").get<std::vector<std::string>>();
    r.m_ap = j.at("summary").at("m_ap").get<double>();
    r.ap_50 = j.at("summary").at("ap_50").get<double>();
    r.m_ar_100 = j.at("summary").at("m_ar_100").get<double>();
    for (AreaRange a : kAreaRanges) {
      r.num_gt[static_cast<std::size_t>(a)] =
          j.at("num_gt").at(std::string(to_string(a))).get<std::size_t>();
    }
    for (const auto& row : j.at("ap")) {
      r.iou_thresholds.push_back(row.at("iou").get<double>());
      BucketRow v{};
      for (AreaRange a : kAreaRanges) {
        v[static_cast<std::size_t>(a)] = row.at(std::string(to_string(a))).get<double>();
      }
      r.ap.push_back(v);
    }
    for (const auto& row : j.at("ar")) {
      r.max_dets.push_back(row.at("max_det").get<int>());
      BucketRow v{};
      for (AreaRange a : kAreaRanges) {
        v[static_cast<std::size_t>(a)] = row.at(std::string(to_string(a))).get<double>();
      }
      r.ar.push_back(v);
    }
    r.unknown_images = j.at("unknown_images").get<std::vector<std::string>>();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source + ": not an evaluation report: " + e.what());
  }
}

inline NamedResult load_eval_report(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open report '" + file.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(file.filename().string() + ": invalid JSON: " + e.what());
  }
  return eval_result_from_json(j, file.filename().string());
}

// Flat CSV: run,metric,iou,bucket,max_det,value. Cells that are averaged
// over thresholds leave iou empty.
inline std::string eval_result_to_csv(const EvalResult& r, const std::string& run) {
  using detail::num;
  std::ostringstream o;
  o << "run,metric,iou,bucket,max_det,value\n";
  const std::string cap = r.max_dets.empty() ? "" : std::to_string(r.max_dets.back());
  for (std::size_t t = 0; t < r.ap.size(); ++t) {
    for (AreaRange a : kAreaRanges) {
      o << run << ",ap," << num(r.iou_thresholds[t]) << ',' << to_string(a) << ','
        << cap << ',' << num(r.ap[t][static_cast<std::size_t>(a)]) << '\n';
    }
  }
  for (std::size_t m = 0; m < r.ar.size(); ++m) {
    for (AreaRange a : kAreaRanges) {
      o << run << ",ar,," << to_string(a) << ',' << r.max_dets[m] << ','
        << num(r.ar[m][static_cast<std::size_t>(a)]) << '\n';
    }
  }
  for (AreaRange a : kAreaRanges) {
    o << run << ",m_ap,," << to_string(a) << ',' << cap << ','
      << num(r.mean_ap(a)) << '\n';
  }
  o << run << ",ap_50,0.5,all," << cap << ',' << num(r.ap_50) << '\n';
  o << run << ",m_ar_100,,all," << cap << ',' << num(r.m_ar_100) << '\n';
  return o.str();
}

struct Comparison {
  static constexpr std::array<const char*, 9> kColumns{
      "m_ap",      "ap_50",  "m_ar_100", "ap_small", "ap_medium",
      "ap_large", "ar_small", "ar_medium", "ar_large"};

  std::vector<std::string> runs;
  std::vector<std::array<double, 9>> rows;
  // Plot series: per run, (iou, AP per bucket).
  std::vector<std::vector<std::pair<double, BucketRow>>> series;

  std::string to_text() const {
    std::size_t name_w = 3;
    for (const auto& r : runs) name_w = std::max(name_w, r.size());
    std::ostringstream o;
    o << "| " << std::string("run") << std::string(name_w - 3, ' ') << " |";
    for (const char* c : kColumns) {
      std::string h = c;
      o << ' ' << std::string(h.size() < 9 ? 9 - h.size() : 0, ' ') << h << " |";
    }
    o << "\n|" << std::string(name_w + 2, '-') << '|';
    for (const char* c : kColumns) {
      o << std::string(std::max<std::size_t>(9, std::string(c).size()) + 2, '-') << '|';
    }
    o << '\n';
    for (std::size_t i = 0; i < runs.size(); ++i) {
      o << "| " << runs[i] << std::string(name_w - runs[i].size(), ' ') << " |";
      for (std::size_t c = 0; c < kColumns.size(); ++c) {
        const std::string v = detail::fixed3(rows[i][c]);
        const std::size_t w = std::max<std::size_t>(9, std::string(kColumns[c]).size());
        o << ' ' << std::string(w - v.size(), ' ') << v << " |";
      }
      o << '\n';
    }
    return o.str();
  }

  std::string to_csv() const {
    std::ostringstream o;
    o << "run";
    for (const char* c : kColumns) o << ',' << c;
    o << '\n';
    for (std::size_t i = 0; i < runs.size(); ++i) {
      o << runs[i];
      for (double v : rows[i]) o << ',' << detail::num(v);
      o << '\n';
    }
    return o.str();
  }

  // Long format for plotting AP against the IoU threshold.
  std::string series_csv() const {
    std::ostringstream o;
    o << "run,iou,ap_all,ap_small,ap_medium,ap_large\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
      for (const auto& [iou, ap] : series[i]) {
        o << runs[i] << ',' << detail::num(iou);
        for (double v : ap) o << ',' << detail::num(v);
        o << '\n';
      }
    }
    return o.str();
  }
};

inline Comparison compare_runs(const std::vector<NamedResult>& results) {
  if (results.empty()) throw InvalidArgument("compare needs at least one run");
  Comparison c;
  for (const auto& [run, r] : results) {
    c.runs.push_back(run);
    c.rows.push_back({r.m_ap, r.ap_50, r.m_ar_100, r.mean_ap(AreaRange::kSmall),
                      r.mean_ap(AreaRange::kMedium), r.mean_ap(AreaRange::kLarge),
                      r.mean_ar(AreaRange::kSmall), r.mean_ar(AreaRange::kMedium),
                      r.mean_ar(AreaRange::kLarge)});
    std::vector<std::pair<double, BucketRow>> s;
    for (std::size_t t = 0; t < r.ap.size(); ++t) s.emplace_back(r.iou_thresholds[t], r.ap[t]);
    c.series.push_back(std::move(s));
  }
  return c;
}

}  // namespace weldqa
