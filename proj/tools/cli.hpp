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
// weldqa command line: stats | prep | augment | split | eval | compare |
// assess. Configuration comes from an INI file (--config) and flags; a flag
// always wins over the file. Every flag is stored under the same
// section.key as its file counterpart, so both go through one parser.
#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "weldqa/augment.hpp"
#include "weldqa/coco_eval.hpp"
#include "weldqa/dataset.hpp"
#include "weldqa/detections_io.hpp"
#include "weldqa/error.hpp"
#include "weldqa/parallel.hpp"
#include "weldqa/png_io.hpp"
#include "weldqa/qa_decision.hpp"
#include "weldqa/raster.hpp"
#include "weldqa/report.hpp"
#include "weldqa/voc_io.hpp"

namespace weldqa::cli {

namespace fs = std::filesystem;

// Fully resolved settings for one invocation.
struct RunConfig {
  std::uint64_t seed = 0;
  int workers = 1;
  fs::path out;
  std::vector<fs::path> datasets;
  SizeBuckets buckets;

  std::optional<CropRect> crop;
  bool enhance = true;
  double min_box_area = kDefaultMinBoxArea;

  AugmentPlan plan;

  std::optional<SplitRatios> ratios;

  EvalConfig eval;
  fs::path detections;
  std::string run_name;
  std::vector<fs::path> reports;

  std::optional<double> threshold_mm;
  double min_score = 0.0;
  Calibration calibration;
  SizeMeasure size_measure = SizeMeasure::kLongerSide;
};

// Accepted section.key names. Anything else in a config file is an error.
inline const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"general", {"seed", "workers", "out"}},
      {"dataset", {"path", "buckets"}},
      {"prep", {"crop", "enhance", "min_box_area"}},
      {"augment",
       {"factor", "ops", "scale", "translate", "blur_sigma", "contrast",
        "noise_sigma", "noise_channels", "fill", "min_box_area", "max_attempts"}},
      {"split", {"ratios"}},
      {"eval",
       {"detections", "iou_list", "max_dets", "recall_points", "score_floor", "run"}},
      {"compare", {"reports"}},
      {"assess",
       {"detections", "threshold_mm", "min_score", "px_per_mm", "size_measure"}},
  };
  return keys;
}

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

inline double to_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  double out = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || p != t.data() + t.size() || !std::isfinite(out)) {
    throw InvalidArgument(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

inline long long to_int(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  long long out = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || p != t.data() + t.size()) {
    throw InvalidArgument(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || p != t.data() + t.size()) {
    throw InvalidArgument(key + ": expected a nonnegative integer, got '" + v + "'");
  }
  return out;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw InvalidArgument(key + ": expected true or false, got '" + v + "'");
}

inline std::vector<double> to_doubles(const std::string& key, const std::string& v,
                                      std::size_t expect = 0) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(key, item));
  if (expect && out.size() != expect) {
    throw InvalidArgument(key + ": expected " + std::to_string(expect) +
                          " comma-separated numbers, got '" + v + "'");
  }
  return out;
}

// "a^2" or a plain number.
inline double to_area(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t.size() > 2 && t.ends_with("^2")) {
    const double side = to_double(key, t.substr(0, t.size() - 2));
    return side * side;
  }
  return to_double(key, t);
}

inline Range to_range(const std::string& key, const std::string& v) {
  const auto r = to_doubles(key, v, 2);
  return {r[0], r[1]};
}

// Comma list, or lo:hi:step. Values are snapped to 1e-9 so that a
// generated 0.6 equals the literal 0.6.
inline std::vector<double> to_iou_list(const std::string& key, const std::string& v) {
  if (v.find(':') == std::string::npos) return to_doubles(key, v);
  const auto parts = split_list(v, ':');
  if (parts.size() != 3) {
    throw InvalidArgument(key + ": expected lo:hi:step, got '" + v + "'");
  }
  const double lo = to_double(key, parts[0]);
  const double hi = to_double(key, parts[1]);
  const double step = to_double(key, parts[2]);
  if (!(step > 0.0) || hi < lo) throw InvalidArgument(key + ": bad range '" + v + "'");
  const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (long long i = 0; i < n; ++i) {
    out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9);
  }
  return out;
}

}  // namespace detail

// Applies one setting. Keys are "section.key".
inline void apply_setting(RunConfig& c, const std::string& section,
                          const std::string& key, const std::string& value) {
  using namespace detail;
  const auto sec = known_keys().find(section);
  if (sec == known_keys().end()) {
    throw InvalidArgument("unknown config section [" + section + "]");
  }
  if (!sec->second.contains(key)) {
    throw InvalidArgument("unknown config key '" + key + "' in [" + section + "]");
  }
  const std::string name = section + "." + key;
  if (section == "general") {
    if (key == "seed") c.seed = to_u64(name, value);
    if (key == "workers") {
      const auto w = to_int(name, value);
      if (w < 1 || w > 1024) throw InvalidArgument(name + ": must be in [1, 1024]");
      c.workers = static_cast<int>(w);
    }
    if (key == "out") c.out = trim(value);
  } else if (section == "dataset") {
    if (key == "path") {
      c.datasets.clear();
      for (const auto& p : split_list(value, ';')) c.datasets.emplace_back(p);
    }
    if (key == "buckets") {
      const auto parts = split_list(value);
      if (parts.size() != 2) throw InvalidArgument(name + ": expected small,large");
      c.buckets = {to_area(name, parts[0]), to_area(name, parts[1])};
      c.buckets.validate();
    }
  } else if (section == "prep") {
    if (key == "crop") {
      const auto v = to_doubles(name, value, 4);
      c.crop = CropRect{static_cast<int>(v[0]), static_cast<int>(v[1]),
                        static_cast<int>(v[2]), static_cast<int>(v[3])};
    }
    if (key == "enhance") c.enhance = to_bool(name, value);
    if (key == "min_box_area") c.min_box_area = to_double(name, value);
  } else if (section == "augment") {
    auto& p = c.plan;
    if (key == "factor") {
      const auto k = to_int(name, value);
      if (k < 1) throw InvalidArgument(name + ": must be >= 1");
      p.scale_factor = static_cast<int>(k);
    }
    if (key == "ops") {
      p.op_pool.clear();
      for (const auto& op : split_list(value)) p.op_pool.push_back(parse_op_family(op));
    }
    if (key == "scale") p.ranges.scale = to_range(name, value);
    if (key == "translate") p.ranges.translate = to_range(name, value);
    if (key == "blur_sigma") p.ranges.blur_sigma = to_range(name, value);
    if (key == "contrast") p.ranges.contrast = to_range(name, value);
    if (key == "noise_sigma") p.ranges.noise_sigma = to_range(name, value);
    if (key == "noise_channels") {
      const std::string v = trim(value);
      if (v == "independent") {
        p.noise_channels = NoiseChannels::kIndependent;
      } else if (v == "shared") {
        p.noise_channels = NoiseChannels::kShared;
      } else {
        throw InvalidArgument(name + ": expected independent or shared");
      }
    }
    if (key == "fill") {
      const auto f = to_int(name, value);
      if (f < 0 || f > 255) throw InvalidArgument(name + ": must be in [0, 255]");
      p.fill = static_cast<std::uint8_t>(f);
    }
    if (key == "min_box_area") p.min_box_area = to_double(name, value);
    if (key == "max_attempts") p.max_attempts = static_cast<int>(to_int(name, value));
  } else if (section == "split") {
    const auto v = to_doubles(name, value, 3);
    c.ratios = SplitRatios{v[0], v[1], v[2]};
  } else if (section == "eval") {
    if (key == "detections") c.detections = trim(value);
    if (key == "iou_list") c.eval.iou_thresholds = to_iou_list(name, value);
    if (key == "max_dets") {
      c.eval.max_dets.clear();
      for (const auto& m : split_list(value)) {
        c.eval.max_dets.push_back(static_cast<int>(to_int(name, m)));
      }
    }
    if (key == "recall_points") {
      c.eval.recall_points = static_cast<int>(to_int(name, value));
    }
    if (key == "score_floor") c.eval.score_floor = to_double(name, value);
    if (key == "run") c.run_name = trim(value);
  } else if (section == "compare") {
    c.reports.clear();
    for (const auto& p : split_list(value, ';')) c.reports.emplace_back(p);
  } else if (section == "assess") {
    if (key == "detections") c.detections = trim(value);
    if (key == "threshold_mm") c.threshold_mm = to_double(name, value);
    if (key == "min_score") c.min_score = to_double(name, value);
    if (key == "px_per_mm") c.calibration.px_per_mm = to_double(name, value);
    if (key == "size_measure") c.size_measure = parse_size_measure(trim(value));
  }
}

inline void apply_config_file(RunConfig& c, const fs::path& file) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(file.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError("config '" + file.string() + "': " + e.message() +
                     " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw InvalidArgument("config '" + file.string() + "': key '" + section +
                            "' must be inside a [section]");
    }
    for (const auto& [key, value] : body) {
      try {
        apply_setting(c, section, key, value.data());
      } catch (const Error& e) {
        throw InvalidArgument("config '" + file.string() + "': " + e.what());
      }
    }
  }
}

namespace detail {

struct Log {
  std::ostream& err;
  std::mutex mu;

  void info(const std::string& msg) {
    std::lock_guard lock(mu);
    err << "weldqa: " << msg << '\n';
  }
  void warn(const std::string& msg) {
    std::lock_guard lock(mu);
    err << "weldqa: warning: " << msg << '\n';
  }
  void error(const std::string& msg) {
    std::lock_guard lock(mu);
    err << "weldqa: error: " << msg << '\n';
  }
};

inline void write_text(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + file.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + file.string() + "'");
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

inline Dataset load_dataset(const fs::path& dir, Log& log) {
  std::vector<std::string> warnings;
  Dataset d = load_voc(dir, &warnings);
  for (const auto& w : warnings) log.warn(w);
  return d;
}

inline void copy_image(const fs::path& from, const fs::path& to) {
  std::error_code ec;
  fs::copy_file(from, to, fs::copy_options::overwrite_existing, ec);
  if (ec) {
    throw IoError("cannot copy '" + from.string() + "' to '" + to.string() +
                  "': " + ec.message());
  }
}

// Output directory for `ds` under `root`, with records pointing at copies of
// their images.
inline void write_dataset_copy(const Dataset& ds, const fs::path& root) {
  Dataset copy = ds;
  fs::create_directories(root);
  for (auto& im : copy.images) {
    const fs::path target = root / im.file_path.filename();
    copy_image(im.file_path, target);
    im.file_path = target.filename();
  }
  write_voc(copy, root);
}

}  // namespace detail

inline int cmd_stats(const RunConfig& c, std::ostream& out, detail::Log& log) {
  detail::require(!c.datasets.empty(), "stats: --dataset is required");
  std::vector<std::pair<std::string, Dataset>> named;
  for (const auto& p : c.datasets) {
    const std::string name = p.filename().empty() ? p.parent_path().filename().string()
                                                  : p.filename().string();
    named.emplace_back(name, detail::load_dataset(p, log));
  }
  const BucketReport report = bucket_report(named, c.buckets);
  out << report.to_text();
  if (!c.out.empty()) {
    detail::write_text(c.out, report.to_csv());
    log.info("wrote " + c.out.string());
  }
  return 0;
}

inline int cmd_prep(const RunConfig& c, std::ostream& out, detail::Log& log) {
  detail::require(c.datasets.size() == 1, "prep: exactly one --dataset is required");
  detail::require(!c.out.empty(), "prep: --out is required");
  const Dataset d = detail::load_dataset(c.datasets.front(), log);
  fs::create_directories(c.out);

  std::vector<ImageRecord> records(d.images.size());
  std::vector<std::vector<Annotation>> anns(d.images.size());
  parallel_for(d.images.size(), c.workers, [&](std::size_t i) {
    const ImageRecord& src = d.images[i];
    const Raster raw = read_png(src.file_path);
    if (raw.width != src.width || raw.height != src.height) {
      throw InvalidArgument(src.file_path.string() + ": size differs from annotation");
    }
    const CropRect rect = c.crop ? *c.crop : centered_crop(raw.width, raw.height);
    LabeledRaster cropped = crop(raw, rect, d.annotations_for(src.image_id), c.min_box_area);
    Raster img = gray_to_rgb(cropped.raster);
    if (c.enhance) img = normalize_contrast(img);
    ImageRecord rec{src.image_id, src.image_id + ".png", img.width, img.height,
                    img.channels};
    write_png(img, c.out / rec.file_path);
    records[i] = rec;
    anns[i] = std::move(cropped.annotations);
  });

  Dataset prepared;
  for (std::size_t i = 0; i < records.size(); ++i) {
    prepared.images.push_back(records[i]);
    for (auto& a : anns[i]) prepared.annotations.push_back(std::move(a));
  }
  const std::size_t dropped = d.annotations.size() - prepared.annotations.size();
  if (dropped) log.warn(std::to_string(dropped) + " boxes fell outside the crop and were dropped");
  write_voc(prepared, c.out);
  out << "prepared " << prepared.images.size() << " images, "
      << prepared.annotations.size() << " boxes -> " << c.out.string() << '\n';
  return 0;
}

inline int cmd_augment(const RunConfig& c, std::ostream& out, detail::Log& log) {
  detail::require(c.datasets.size() == 1, "augment: exactly one --dataset is required");
  detail::require(!c.out.empty(), "augment: --out is required");
  const Dataset d = detail::load_dataset(c.datasets.front(), log);
  AugmentPlan plan = c.plan;
  plan.master_seed = c.seed;
  fs::create_directories(c.out);

  const ScaledDataset scaled = scale_dataset(
      d, plan, [](const ImageRecord& rec) { return read_png(rec.file_path); },
      [&](const GeneratedImage& g) {
        const fs::path target = c.out / g.record.file_path;
        if (g.provenance.replica_index == 0) {
          detail::copy_image(g.source.file_path, target);
        } else {
          write_png(g.raster, target);
        }
      },
      c.workers);
  for (const auto& w : scaled.warnings) log.warn(w);
  write_voc(scaled.dataset, c.out);
  detail::write_text(c.out / "provenance.jsonl", format_provenance(scaled.provenance));
  out << "scaled " << d.images.size() << " images x" << plan.scale_factor << " -> "
      << scaled.dataset.images.size() << " images, "
      << scaled.dataset.annotations.size() << " boxes in " << c.out.string() << '\n';
  return 0;
}

inline int cmd_split(const RunConfig& c, std::ostream& out, detail::Log& log) {
  detail::require(c.datasets.size() == 1, "split: exactly one --dataset is required");
  detail::require(c.ratios.has_value(), "split: --ratios is required");
  detail::require(!c.out.empty(), "split: --out is required");
  const Dataset d = detail::load_dataset(c.datasets.front(), log);
  const auto parts = split(d, *c.ratios, c.seed);
  std::string listing = "image_id,part\n";
  for (const auto& part : parts) {
    const std::string tag(to_string(part.split_tag));
    detail::write_dataset_copy(part, c.out / tag);
    std::vector<std::string> ids;
    for (const auto& im : part.images) ids.push_back(im.image_id);
    std::sort(ids.begin(), ids.end());
    for (const auto& id : ids) listing += id + ',' + tag + '\n';
    out << tag << ": " << part.images.size() << " images, "
        << part.annotations.size() << " boxes\n";
  }
  detail::write_text(c.out / "split.csv", listing);
  return 0;
}

inline int cmd_eval(const RunConfig& c, std::ostream& out, detail::Log& log) {
  detail::require(c.datasets.size() == 1, "eval: exactly one --dataset is required");
  detail::require(!c.detections.empty(), "eval: --detections is required");
  const Dataset d = detail::load_dataset(c.datasets.front(), log);
  const auto dets = load_detections(c.detections);
  EvalConfig cfg = c.eval;
  cfg.buckets = c.buckets;
  const EvalResult r = evaluate(dets, d, cfg, c.workers);
  for (const auto& id : r.unknown_images) {
    log.warn("detections reference unknown image '" + id + "'");
  }
  const std::string run = c.run_name.empty() ? c.detections.stem().string() : c.run_name;
  out << "run " << run << ": mAP " << weldqa::detail::fixed3(r.m_ap) << ", AP50 "
      << weldqa::detail::fixed3(r.ap_50) << ", mAR@" << cfg.max_dets.back() << ' '
      << weldqa::detail::fixed3(r.m_ar_100) << '\n';
  for (AreaRange a : kAreaRanges) {
    out << "  " << to_string(a) << ": mAP " << weldqa::detail::fixed3(r.mean_ap(a)) << ", mAR "
        << weldqa::detail::fixed3(r.mean_ar(a)) << " (" << r.num_gt[static_cast<std::size_t>(a)]
        << " gt)\n";
  }
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    detail::write_text(c.out / (run + ".json"),
                       eval_result_to_json(r, run, cfg).dump(2) + "\n");
    detail::write_text(c.out / (run + ".csv"), eval_result_to_csv(r, run));
    log.info("wrote " + (c.out / (run + ".json")).string());
  }
  return 0;
}

inline int cmd_compare(const RunConfig& c, std::ostream& out, detail::Log& log) {
  detail::require(!c.reports.empty(), "compare: --reports is required");
  std::vector<NamedResult> runs;
  for (const auto& p : c.reports) runs.push_back(load_eval_report(p));
  const Comparison cmp = compare_runs(runs);
  out << cmp.to_text();
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    detail::write_text(c.out / "comparison.csv", cmp.to_csv());
    detail::write_text(c.out / "comparison.txt", cmp.to_text());
    detail::write_text(c.out / "series.csv", cmp.series_csv());
    log.info("wrote comparison to " + c.out.string());
  }
  return 0;
}

inline int cmd_assess(const RunConfig& c, std::ostream& out, detail::Log& log) {
  detail::require(!c.detections.empty(), "assess: --detections is required");
  detail::require(c.threshold_mm.has_value(), "assess: --threshold-mm is required");
  const auto dets = load_detections(c.detections);
  std::vector<std::string> ids;
  if (!c.datasets.empty()) {
    for (const auto& p : c.datasets) {
      for (const auto& im : detail::load_dataset(p, log).images) ids.push_back(im.image_id);
    }
  }
  AssessOptions opts;
  opts.threshold_mm = *c.threshold_mm;
  opts.min_score = c.min_score;
  opts.calibration = c.calibration;
  opts.measure = c.size_measure;
  const auto verdicts = assess(dets, opts, ids);
  if (c.out.empty()) {
    out << verdicts_to_csv(verdicts);
  } else {
    detail::write_text(c.out, verdicts_to_csv(verdicts));
    out << verdict_summary(verdicts);
  }
  return 0;
}

// Entry point. Returns the process exit status: 0 success, 1 I/O or
// validation failure, 2 usage error.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Weld-seam pore dataset preparation, augmentation and evaluation"};
  app.name("weldqa");
  app.require_subcommand(1, 1);

  // Raw flag values, keyed by config section.key.
  std::map<std::string, std::string> flags;
  std::vector<std::string> dataset_paths, report_paths;
  std::string config_path;

  struct Flag {
    CLI::Option* opt;
    std::string key;
  };
  std::vector<Flag> bound;
  const auto add = [&](CLI::App* sub, const std::string& name, const std::string& key,
                       const std::string& help) {
    bound.push_back({sub->add_option(name, flags[key], help), key});
    return bound.back().opt;
  };
  const auto shared = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
    add(sub, "--seed", "general.seed", "Seed for every random choice");
    add(sub, "--workers", "general.workers", "Worker threads (results do not depend on it)");
    add(sub, "--out", "general.out", "Output path");
    add(sub, "--buckets", "dataset.buckets",
        "Size bucket areas small,large in px^2 (e.g. 32^2,64^2)");
  };

  auto* stats = app.add_subcommand("stats", "Small/medium/large box counts per dataset");
  shared(stats);
  stats->add_option("--dataset", dataset_paths, "VOC dataset directory (repeatable)");

  auto* prep = app.add_subcommand("prep", "Crop, convert to RGB and contrast-normalize");
  shared(prep);
  prep->add_option("--dataset", dataset_paths, "VOC dataset directory");
  add(prep, "--crop", "prep.crop", "Crop window x,y,w,h (default: centered 300x300)");
  bool no_enhance = false;
  prep->add_flag("--no-enhance", no_enhance, "Skip contrast normalization");
  add(prep, "--min-box-area", "prep.min_box_area", "Drop clipped boxes below this area");

  auto* aug = app.add_subcommand("augment", "Offline dataset scaling by augmentation");
  shared(aug);
  aug->add_option("--dataset", dataset_paths, "VOC dataset directory");
  add(aug, "--factor", "augment.factor", "Scale factor k (output has k*N images)");
  add(aug, "--ops", "augment.ops",
      "Op pool: scale_translate,flip_h,flip_v,gaussian_blur,contrast,gaussian_noise");

  auto* spl = app.add_subcommand("split", "Seeded train/val/test split");
  shared(spl);
  spl->add_option("--dataset", dataset_paths, "VOC dataset directory");
  add(spl, "--ratios", "split.ratios", "train,val,test fractions summing to 1");

  auto* ev = app.add_subcommand("eval", "COCO-style AP/AR of a detections file");
  shared(ev);
  ev->add_option("--dataset", dataset_paths, "Ground-truth VOC dataset directory");
  add(ev, "--detections", "eval.detections", "Detections file (JSON lines)");
  add(ev, "--iou-list", "eval.iou_list", "IoU thresholds: list or lo:hi:step");
  add(ev, "--max-dets", "eval.max_dets", "Per-image detection caps, increasing");
  add(ev, "--score-floor", "eval.score_floor", "Drop detections scoring below this");
  add(ev, "--run", "eval.run", "Run name (default: detections file stem)");

  auto* cmp = app.add_subcommand("compare", "Side-by-side table of evaluation reports");
  shared(cmp);
  cmp->add_option("--reports", report_paths, "Evaluation report JSON files")->expected(1, -1);

  auto* as = app.add_subcommand("assess", "Accept/reject verdicts from pore sizes");
  shared(as);
  as->add_option("--dataset", dataset_paths,
                 "Optional VOC dataset; its images without detections get no-detection");
  add(as, "--detections", "assess.detections", "Detections file (JSON lines)");
  add(as, "--threshold-mm", "assess.threshold_mm", "Reject when a pore exceeds this size");
  add(as, "--min-score", "assess.min_score", "Ignore detections scoring below this");
  add(as, "--px-per-mm", "assess.px_per_mm", "Calibration (default 40)");
  add(as, "--size-measure", "assess.size_measure", "longer | shorter | sqrt-area");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  detail::Log log{err, {}};
  try {
    RunConfig cfg;
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    for (const auto& f : bound) {
      if (f.opt->count() == 0) continue;
      const auto dot = f.key.find('.');
      apply_setting(cfg, f.key.substr(0, dot), f.key.substr(dot + 1), flags[f.key]);
    }
    if (!dataset_paths.empty()) cfg.datasets.assign(dataset_paths.begin(), dataset_paths.end());
    if (!report_paths.empty()) cfg.reports.assign(report_paths.begin(), report_paths.end());
    if (no_enhance) cfg.enhance = false;
    cfg.plan.validate();
    cfg.eval.validate();

    if (stats->parsed()) return cmd_stats(cfg, out, log);
    if (prep->parsed()) return cmd_prep(cfg, out, log);
    if (aug->parsed()) return cmd_augment(cfg, out, log);
    if (spl->parsed()) return cmd_split(cfg, out, log);
    if (ev->parsed()) return cmd_eval(cfg, out, log);
    if (cmp->parsed()) return cmd_compare(cfg, out, log);
    if (as->parsed()) return cmd_assess(cfg, out, log);
  } catch (const Error& e) {
    log.error(e.what());
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    log.error(e.what());
    return 1;
  }
  return 2;
}

}  // namespace weldqa::cli
