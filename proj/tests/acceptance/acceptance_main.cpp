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
// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Tolerances and time limits are pinned
// below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mask_oracle.hpp"
#include "reference_eval.hpp"
#include "test_util.hpp"
#include "weldqa/augment.hpp"
#include "weldqa/coco_eval.hpp"
#include "weldqa/geometry.hpp"
#include "weldqa/png_io.hpp"
#include "weldqa/raster.hpp"
#include "weldqa/voc_io.hpp"

namespace weldqa {
namespace {

constexpr double kIouTolerance = 1e-9;
constexpr double kEvalTolerance = 1e-9;
constexpr double kEdgeTolerancePx = 1.0;
constexpr double kIouTimeLimitS = 5.0;
constexpr double kEvalTimeLimitS = 30.0;
constexpr double kAugmentK8TimeLimitS = 60.0;
constexpr int kIouPairs = 1000;
constexpr int kEvalInstances = 200;
constexpr int kPropagationPairs = 500;
constexpr int kAugmentImages = 50;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome iou_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 eng(20260101);
  std::uniform_int_distribution<int> c(0, 300);
  double worst = 0.0;
  for (int i = 0; i < kIouPairs; ++i) {
    BBox b[2];
    for (auto& bx : b) {
      int x0 = c(eng), x1 = c(eng), y0 = c(eng), y1 = c(eng);
      if (x0 > x1) std::swap(x0, x1);
      if (y0 > y1) std::swap(y0, y1);
      bx = {double(x0), double(y0), double(x1), double(y1)};
    }
    long inter = 0, uni = 0;
    for (int y = 0; y < 300; ++y) {
      for (int x = 0; x < 300; ++x) {
        const bool ia = x >= b[0].x_min && x < b[0].x_max && y >= b[0].y_min && y < b[0].y_max;
        const bool ib = x >= b[1].x_min && x < b[1].x_max && y >= b[1].y_min && y < b[1].y_max;
        inter += ia && ib;
        uni += ia || ib;
      }
    }
    const double expect = uni == 0 ? 0.0 : double(inter) / double(uni);
    worst = std::max(worst, std::abs(iou(b[0], b[1]) - expect));
  }
  const double s = seconds_since(t0);
  return {worst <= kIouTolerance && s < kIouTimeLimitS,
          std::to_string(kIouPairs) + " pairs, max |err| " + fmt("%.3g", worst) + ", " +
              fmt("%.2f", s) + " s (limit 5 s)"};
}

std::vector<testing::EvalInstance> eval_instances() {
  std::mt19937_64 eng(20260102);
  std::vector<testing::EvalInstance> out;
  for (int i = 0; i < kEvalInstances; ++i) {
    out.push_back(testing::random_instance(eng, 5, 3, 4, i % 2 == 1));
  }
  return out;
}

Outcome evaluator_oracle(const std::vector<testing::EvalInstance>& instances) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int cells = 0;
  for (const auto& inst : instances) {
    const EvalResult r = evaluate(inst.dets, inst.gt);
    const auto ref = testing::reference_evaluate(inst.dets, inst.gt);
    for (std::size_t t = 0; t < r.ap.size(); ++t) {
      for (int a = 0; a < 4; ++a, ++cells) worst = std::max(worst, std::abs(r.ap[t][a] - ref.ap[t][a]));
    }
    for (std::size_t m = 0; m < r.ar.size(); ++m) {
      for (int a = 0; a < 4; ++a, ++cells) worst = std::max(worst, std::abs(r.ar[m][a] - ref.ar[m][a]));
    }
    worst = std::max({worst, std::abs(r.m_ap - ref.m_ap), std::abs(r.ap_50 - ref.ap_50),
                      std::abs(r.m_ar_100 - ref.m_ar_100)});
  }
  const double s = seconds_since(t0);
  return {worst <= kEvalTolerance && s < kEvalTimeLimitS,
          std::to_string(instances.size()) + " instances, " + std::to_string(cells) +
              " cells, max |diff| " + fmt("%.3g", worst) + ", " + fmt("%.2f", s) +
              " s (limit 30 s)"};
}

Outcome known_value() {
  Dataset gt;
  gt.images.push_back({"img", "img.png", 300, 300, 1});
  gt.annotations.push_back({"img", "pore", {0, 0, 10, 10}});
  const std::vector<Detection> dets{{"img", "pore", {0, 0, 10, 6}, 0.9}};
  const EvalResult r = evaluate(dets, gt);
  const bool ok = r.ap_50 == 1.0 && r.m_ap == 0.3 && r.m_ar_100 == 0.3;
  return {ok, "ap_50 " + fmt("%.17g", r.ap_50) + ", m_ap " + fmt("%.17g", r.m_ap) +
                  ", m_ar_100 " + fmt("%.17g", r.m_ar_100) + " (exact 1, 0.3, 0.3)"};
}

Outcome perfect_prediction() {
  const auto synth = testing::make_synthetic(20, 300, 300, 20260103);
  std::vector<Detection> dets;
  for (const auto& a : synth.dataset.annotations) dets.push_back({a.image_id, a.label, a.box, 1.0});
  const EvalResult r = evaluate(dets, synth.dataset);
  return {r.m_ap == 1.0 && r.m_ar_100 == 1.0,
          std::to_string(dets.size()) + " boxes, m_ap " + fmt("%.17g", r.m_ap) +
              ", m_ar_100 " + fmt("%.17g", r.m_ar_100) + " (exact 1)"};
}

Outcome monotonicity(const std::vector<testing::EvalInstance>& instances) {
  int violations = 0;
  for (const auto& inst : instances) {
    const EvalResult r = evaluate(inst.dets, inst.gt);
    // AP over all areas; size-bucket AP may rise with the threshold because
    // a stricter match can turn a counted false positive into an ignored one.
    for (std::size_t t = 1; t < r.ap.size(); ++t) {
      if (r.ap[t][0] > r.ap[t - 1][0]) ++violations;
    }
    for (int a = 0; a < 4; ++a) {
      for (std::size_t m = 1; m < r.ar.size(); ++m) {
        if (r.ar[m][a] < r.ar[m - 1][a]) ++violations;
      }
    }
    if (r.ap_50 < r.m_ap) ++violations;
  }
  return {violations == 0, std::to_string(instances.size()) + " instances (AP over all areas), " +
                               std::to_string(violations) + " violations"};
}

Outcome bbox_propagation() {
  std::mt19937_64 eng(20260104);
  std::uniform_int_distribution<int> pos(0, 260), side(4, 90), kind(0, 2);
  std::uniform_real_distribution<double> sc(0.5, 1.6), tr(-40, 40);
  const int w = 300, h = 300;
  int failures = 0, flips = 0, affines = 0, dropped = 0;
  for (int i = 0; i < kPropagationPairs; ++i) {
    const int x = pos(eng), y = pos(eng);
    const BBox b{double(x), double(y), double(std::min(w, x + side(eng))),
                 double(std::min(h, y + side(eng)))};
    const Raster mask = testing::box_mask(w, h, b);
    const std::vector<Annotation> anns{{"m", "pore", b}};
    LabeledRaster out;
    switch (kind(eng)) {
      case 0:
        out = flip(mask, FlipAxis::kHorizontal, anns);
        ++flips;
        break;
      case 1:
        out = flip(mask, FlipAxis::kVertical, anns);
        ++flips;
        break;
      default: {
        const double sx = sc(eng), sy = sc(eng);
        out = affine_warp(mask, AffineMap::scale_about(sx, sy, w / 2.0, h / 2.0, tr(eng), tr(eng)),
                          anns, 0, 0.0);
        ++affines;
      }
    }
    std::optional<BBox> prop;
    if (!out.annotations.empty()) prop = out.annotations[0].box;
    if (!prop) ++dropped;
    if (!testing::agrees_with_mask(prop, testing::mask_box(out.raster), kEdgeTolerancePx)) ++failures;
  }
  return {failures == 0, std::to_string(kPropagationPairs) + " pairs (" + std::to_string(flips) +
                             " flips, " + std::to_string(affines) + " affines, " +
                             std::to_string(dropped) + " left the frame), " +
                             std::to_string(failures) + " outside +/-1 px"};
}

// Runs scale_dataset writing PNG/VOC/provenance to `dir`.
void scale_to_disk(const testing::SyntheticDataset& synth, int k, int workers,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  AugmentPlan plan;
  plan.scale_factor = k;
  plan.master_seed = 7;
  const ScaledDataset s = scale_dataset(
      synth.dataset, plan,
      [&](const ImageRecord& rec) { return synth.rasters.at(rec.image_id); },
      [&](const GeneratedImage& g) { write_png(g.raster, dir / g.record.file_path); }, workers);
  write_voc(s.dataset, dir);
  testing::write_file(dir / "provenance.jsonl", format_provenance(s.provenance));
}

Outcome augmentation() {
  const auto synth = testing::make_synthetic(kAugmentImages, 300, 300, 20260105);
  testing::TempDir tmp("weldqa_accept");
  bool ok = true;
  std::ostringstream detail;
  double k8_seconds = 0.0;
  for (int k : {2, 4, 6, 8}) {
    const auto t0 = Clock::now();
    // Same leaf name in each run: VOC documents record their folder name.
    const auto out = [&](const char* run) { return tmp.path() / run / ("k" + std::to_string(k)); };
    scale_to_disk(synth, k, 1, out("a"));
    const double s = seconds_since(t0);
    if (k == 8) k8_seconds = s;
    scale_to_disk(synth, k, 1, out("b"));
    scale_to_disk(synth, k, 4, out("c"));
    const auto a = testing::snapshot(out("a"));
    const auto b = testing::snapshot(out("b"));
    const auto c = testing::snapshot(out("c"));
    const std::size_t pngs = static_cast<std::size_t>(std::count_if(
        a.begin(), a.end(), [](const auto& kv) { return kv.first.ends_with(".png"); }));
    const Dataset loaded = load_voc(out("a"));
    const bool count_ok = pngs == static_cast<std::size_t>(k * kAugmentImages) &&
                          loaded.images.size() == static_cast<std::size_t>(k * kAugmentImages);
    const bool same = a == b && a == c;
    ok = ok && count_ok && same;
    detail << "k=" << k << ": " << loaded.images.size() << " images"
           << (same ? " identical" : " DIFFER") << "; ";
  }
  ok = ok && k8_seconds < kAugmentK8TimeLimitS;
  detail << "k=8 in " << fmt("%.2f", k8_seconds) << " s (limit 60 s)";
  return {ok, detail.str()};
}

Outcome table_format() {
  // 5 small, 12 medium and 3 large boxes, several on the bucket edges.
  Dataset d;
  const std::vector<std::pair<double, double>> small{{10, 10}, {31, 33}, {20, 40}, {1, 1000}, {16, 16}};
  const std::vector<std::pair<double, double>> medium{{32, 32}, {64, 64}, {40, 40}, {50, 50},
                                                      {33, 60}, {16, 64}, {64, 16}, {45, 60},
                                                      {32, 128}, {36, 36}, {60, 60}, {48, 50}};
  const std::vector<std::pair<double, double>> large{{65, 64}, {100, 100}, {64, 80}};
  int n = 0;
  for (const auto* group : {&small, &medium, &large}) {
    for (const auto& [w, h] : *group) {
      const std::string id = "t" + std::to_string(n++ / 4);
      if (!d.find_image(id)) d.images.push_back({id, id + ".png", 1200, 1200, 1});
      d.annotations.push_back({id, "pore", {5, 5, 5 + w, 5 + h}});
    }
  }
  std::vector<std::pair<std::string, Dataset>> rows{{"Original", d}};
  std::map<std::string, Raster> rasters;
  for (const auto& im : d.images) rasters.emplace(im.image_id, Raster(1200, 1200, 1, 120));
  for (int k : {2, 4, 6, 8}) {
    AugmentPlan plan;
    plan.scale_factor = k;
    plan.op_pool = {OpFamily::kFlipH, OpFamily::kFlipV, OpFamily::kContrast};
    rows.emplace_back(std::to_string(k) + "x Scaled",
                      scale_dataset(d, plan, rasters).scaled.dataset);
  }
  const BucketReport r = bucket_report(rows);
  const std::string text = r.to_text();
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  bool ok = r.rows.size() == 5 && r.rows[0].second == SizeHistogram{5, 12, 3};
  // Label-preserving ops only, so every scaled row is exactly k times the original.
  for (int i = 1; i < 5 && ok; ++i) {
    const std::size_t k = 2 * static_cast<std::size_t>(i);
    ok = r.rows[i].second == SizeHistogram{5 * k, 12 * k, 3 * k};
  }
  ok = ok && lines.size() == 7 &&
       lines[0].find("Small Pores (pore<32^2px)") != std::string::npos &&
       lines[0].find("Medium Pores (32^2px<pore<64^2px)") != std::string::npos &&
       lines[0].find("Large Pores (pore>64^2px)") != std::string::npos &&
       lines[2].find("| Original ") == 0 && lines[6].find("| 8x Scaled ") == 0;
  const auto& h = r.rows[0].second;
  return {ok, "Original row " + std::to_string(h.small) + "/" + std::to_string(h.medium) + "/" +
                  std::to_string(h.large) + " (expect 5/12/3), " +
                  std::to_string(lines.size() >= 2 ? lines.size() - 2 : 0) + " data rows"};
}

Outcome voc_round_trip() {
  testing::TempDir tmp("weldqa_voc");
  const auto synth = testing::make_synthetic(20, 320, 240, 20260106);
  const Dataset written = testing::write_synthetic(synth, tmp / "set");
  const auto first = testing::snapshot(tmp / "set");
  const Dataset loaded = load_voc(tmp / "set");
  write_voc(loaded, tmp / "set");
  const auto second = testing::snapshot(tmp / "set");
  const bool identity = loaded == written;
  const bool stable = first == second;
  return {identity && stable && loaded.images.size() == 20,
          std::to_string(loaded.images.size()) + " images, " +
              std::to_string(loaded.annotations.size()) + " boxes, load(write(d)) " +
              (identity ? "== d" : "!= d") + ", second write " +
              (stable ? "byte-identical" : "differs")};
}

Outcome preprocessing() {
  const auto synth = testing::make_synthetic(1, 640, 320, 20260107);
  const Raster& gray = synth.rasters.begin()->second;
  const Raster rgb = gray_to_rgb(gray);
  bool channels_ok = rgb.channels == 3 && rgb.pixels.size() == 3 * gray.pixels.size();
  for (std::size_t i = 0; channels_ok && i < gray.pixels.size(); ++i) {
    channels_ok = rgb.pixels[3 * i] == gray.pixels[i] && rgb.pixels[3 * i + 1] == gray.pixels[i] &&
                  rgb.pixels[3 * i + 2] == gray.pixels[i];
  }
  const CropRect rect = centered_crop(640, 320);
  const std::vector<Annotation> anns{{"a", "pore", {200, 40, 260, 90}},
                                     {"a", "pore", {20, 20, 60, 60}}};
  const LabeledRaster c = crop(gray, rect, anns);
  bool crop_ok = c.raster.width == 300 && c.raster.height == 300 && c.annotations.size() == 1 &&
                 c.annotations[0].box == BBox{30, 30, 90, 80};
  for (int y = 0; crop_ok && y < 300; ++y) {
    for (int x = 0; crop_ok && x < 300; ++x) crop_ok = c.raster.at(x, y) == gray.at(x + 170, y + 10);
  }
  return {channels_ok && crop_ok,
          std::string("gray_to_rgb channels ") + (channels_ok ? "identical" : "differ") +
              ", crop " + std::to_string(c.raster.width) + "x" + std::to_string(c.raster.height) +
              " at (" + std::to_string(rect.x) + "," + std::to_string(rect.y) + ") boxes " +
              (crop_ok ? "shifted correctly" : "wrong")};
}

}  // namespace
}  // namespace weldqa

int main() {
  using namespace weldqa;
  const auto instances = eval_instances();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"iou-oracle", iou_oracle},
      {"evaluator-oracle", [&] { return evaluator_oracle(instances); }},
      {"known-value", known_value},
      {"perfect-prediction", perfect_prediction},
      {"metric-monotonicity", [&] { return monotonicity(instances); }},
      {"bbox-propagation-oracle", bbox_propagation},
      {"augmentation-determinism-count", augmentation},
      {"bucket-table-format", table_format},
      {"voc-round-trip", voc_round_trip},
      {"preprocessing-contracts", preprocessing},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s  %-32s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
