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
// COCO-style detection evaluation written from scratch.
//
// For every (class, size bucket, IoU threshold) cell:
//  1. Per image, detections are sorted by descending score (ties keep input
//     order) and capped at the largest max-dets value.
//  2. Each detection takes the unmatched ground truth with the highest IoU
//     at or above the threshold. Ground truth outside the bucket is
//     "ignored": it can absorb a detection, but that detection then counts
//     neither as TP nor FP. In-bucket ground truth is preferred over ignored
//     ground truth. An unmatched detection whose own area is outside the
//     bucket is ignored as well.
//  3. Non-ignored detections of all images are pooled and sorted by score;
//     cumulative precision and recall are formed, precision is replaced by
//     its running maximum from the right, and sampled at the recall points
//     0, 1/(R-1), ..., 1. AP is the mean of the samples.
//  4. AR for a max-dets cap is the fraction of in-bucket ground truth
//     matched when each image keeps only its top `cap` detections.
// Cells without in-bucket ground truth hold kUndefinedMetric (-1). Class
// means and threshold means skip such cells.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "weldqa/dataset.hpp"
#include "weldqa/error.hpp"
#include "weldqa/geometry.hpp"
#include "weldqa/parallel.hpp"

namespace weldqa {

inline constexpr double kUndefinedMetric = -1.0;

// Bucket axis of the result tables. kAll applies no size restriction.
enum class AreaRange { kAll = 0, kSmall = 1, kMedium = 2, kLarge = 3 };
inline constexpr std::size_t kNumAreaRanges = 4;
inline constexpr std::array<AreaRange, kNumAreaRanges> kAreaRanges{
    AreaRange::kAll, AreaRange::kSmall, AreaRange::kMedium, AreaRange::kLarge};

inline std::string_view to_string(AreaRange a) {
  switch (a) {
    case AreaRange::kAll:
      return "all";
    case AreaRange::kSmall:
      return "small";
    case AreaRange::kMedium:
      return "medium";
    case AreaRange::kLarge:
      return "large";
  }
  return "?";
}

inline bool in_range(const BBox& b, AreaRange r, const SizeBuckets& k) {
  if (r == AreaRange::kAll) return true;
  return static_cast<int>(classify_size(b, k)) + 1 == static_cast<int>(r);
}

// 0.50, 0.55, ..., 0.95 computed as (50 + 5i) / 100 so that 0.6 is the
// double nearest 0.6.
inline std::vector<double> default_iou_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back((50 + 5 * i) / 100.0);
  return t;
}

struct EvalConfig {
  std::vector<double> iou_thresholds = default_iou_thresholds();
  int recall_points = 101;
  std::vector<int> max_dets{1, 10, 100};
  SizeBuckets buckets;
  double score_floor = 0.0;

  void validate() const {
    if (iou_thresholds.empty()) throw InvalidArgument("no IoU thresholds");
    for (std::size_t i = 0; i < iou_thresholds.size(); ++i) {
      const double t = iou_thresholds[i];
      if (!(t > 0.0 && t <= 1.0)) {
        throw InvalidArgument("IoU thresholds must lie in (0, 1]");
      }
      if (i > 0 && !(t > iou_thresholds[i - 1])) {
        throw InvalidArgument("IoU thresholds must be strictly increasing");
      }
    }
    if (recall_points < 2) throw InvalidArgument("recall_points must be >= 2");
    if (max_dets.empty()) throw InvalidArgument("no max-dets caps");
    for (std::size_t i = 0; i < max_dets.size(); ++i) {
      if (max_dets[i] < 1 || (i > 0 && max_dets[i] <= max_dets[i - 1])) {
        throw InvalidArgument("max-dets caps must be positive and increasing");
      }
    }
    buckets.validate();
  }

  double recall_point(int k) const {
    return static_cast<double>(k) / (recall_points - 1);
  }
};

enum class MatchStatus { kTruePositive, kFalsePositive, kIgnored };

struct DetectionMatch {
  std::size_t detection = 0;        // index into the detections passed in
  std::ptrdiff_t ground_truth = -1;  // index into the ground truth, -1 if none
  MatchStatus status = MatchStatus::kFalsePositive;
  double score = 0.0;
  std::size_t rank = 0;  // position within its image after score sorting
};

struct MatchSet {
  std::vector<DetectionMatch> detections;
  std::size_t num_gt = 0;  // ground truth not ignored
  std::size_t matched_gt = 0;
  std::vector<std::string> unknown_images;

  std::size_t unmatched_gt() const { return num_gt - matched_gt; }
};

namespace detail {

// Ground truth and detections of one class, grouped per image.
struct ClassTable {
  // Per image: indices into the caller's ground-truth vector.
  std::vector<std::vector<std::size_t>> gts;
  // Per image: indices into the caller's detections vector, sorted by
  // descending score, ties by index.
  std::vector<std::vector<std::size_t>> dets;
};

struct ImageUniverse {
  std::map<std::string, std::size_t, std::less<>> index;
  std::vector<std::string> unknown;  // ids only referenced by detections
};

inline ImageUniverse build_universe(const std::vector<std::string>& known,
                                    std::span<const Detection> dets) {
  ImageUniverse u;
  for (const auto& id : known) u.index.emplace(id, u.index.size());
  std::set<std::string> unknown;
  for (const auto& d : dets) {
    if (!u.index.contains(d.image_id)) unknown.insert(d.image_id);
  }
  for (const auto& id : unknown) {
    u.index.emplace(id, u.index.size());
    u.unknown.push_back(id);
  }
  return u;
}

inline ClassTable build_class_table(const ImageUniverse& u, std::string_view label,
                                    std::span<const Annotation> gts,
                                    std::span<const Detection> dets) {
  ClassTable t;
  t.gts.resize(u.index.size());
  t.dets.resize(u.index.size());
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (gts[i].label != label) continue;
    const auto it = u.index.find(gts[i].image_id);
    if (it == u.index.end()) {
      throw InvalidArgument("ground truth references unknown image '" +
                            gts[i].image_id + "'");
    }
    t.gts[it->second].push_back(i);
  }
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (dets[i].label == label) t.dets[u.index.at(dets[i].image_id)].push_back(i);
  }
  for (auto& v : t.dets) {
    std::stable_sort(v.begin(), v.end(), [&](std::size_t a, std::size_t b) {
      return dets[a].score > dets[b].score;
    });
  }
  return t;
}

// Greedy matching of one image at one threshold. Appends one entry per
// considered detection to `out` and returns the number of in-range ground
// truths it matched.
inline std::size_t match_image(std::span<const std::size_t> det_idx,
                               std::span<const std::size_t> gt_idx,
                               std::span<const Detection> dets,
                               std::span<const Annotation> gts, double thr,
                               AreaRange range, const SizeBuckets& buckets,
                               std::size_t max_det,
                               std::vector<DetectionMatch>& out) {
  // In-range ground truth first, original order kept inside each group.
  std::vector<std::size_t> order(gt_idx.begin(), gt_idx.end());
  std::vector<char> ignored(order.size(), 0);
  std::stable_partition(order.begin(), order.end(), [&](std::size_t g) {
    return in_range(gts[g].box, range, buckets);
  });
  for (std::size_t j = 0; j < order.size(); ++j) {
    ignored[j] = !in_range(gts[order[j]].box, range, buckets);
  }
  std::vector<char> taken(order.size(), 0);
  std::size_t matched = 0;
  const std::size_t n = std::min(det_idx.size(), max_det);
  for (std::size_t r = 0; r < n; ++r) {
    const Detection& d = dets[det_idx[r]];
    std::ptrdiff_t best = -1;
    double best_iou = thr;
    for (std::size_t j = 0; j < order.size(); ++j) {
      if (taken[j]) continue;
      // A usable in-range match beats any ignored one.
      if (best >= 0 && !ignored[best] && ignored[j]) break;
      const double v = iou(d.box, gts[order[j]].box);
      if (v < thr) continue;
      if (best < 0 || v > best_iou) {
        best = static_cast<std::ptrdiff_t>(j);
        best_iou = v;
      }
    }
    DetectionMatch m;
    m.detection = det_idx[r];
    m.score = d.score;
    m.rank = r;
    if (best >= 0) {
      taken[best] = 1;
      m.ground_truth = static_cast<std::ptrdiff_t>(order[best]);
      if (ignored[best]) {
        m.status = MatchStatus::kIgnored;
      } else {
        m.status = MatchStatus::kTruePositive;
        ++matched;
      }
    } else {
      m.status = in_range(d.box, range, buckets) ? MatchStatus::kFalsePositive
                                                  : MatchStatus::kIgnored;
    }
    out.push_back(m);
  }
  return matched;
}

inline MatchSet match_cell(const ClassTable& t, std::span<const Detection> dets,
                           std::span<const Annotation> gts, double thr,
                           AreaRange range, const SizeBuckets& buckets,
                           std::size_t max_det) {
  MatchSet m;
  for (std::size_t i = 0; i < t.gts.size(); ++i) {
    for (std::size_t g : t.gts[i]) {
      if (in_range(gts[g].box, range, buckets)) ++m.num_gt;
    }
    m.matched_gt += match_image(t.dets[i], t.gts[i], dets, gts, thr, range,
                                buckets, max_det, m.detections);
  }
  return m;
}

}  // namespace detail

// Matches detections to ground truth of the same label at one IoU
// threshold, with no size restriction and no per-image cap. Detections on
// images that have no ground truth are false positives and their image ids
// are listed in unknown_images.
inline MatchSet match(std::span<const Detection> dets,
                      std::span<const Annotation> gts, double iou_thr) {
  std::vector<std::string> known;
  std::set<std::string> seen;
  for (const auto& g : gts) {
    if (seen.insert(g.image_id).second) known.push_back(g.image_id);
  }
  const auto u = detail::build_universe(known, dets);
  std::set<std::string> labels;
  for (const auto& g : gts) labels.insert(g.label);
  for (const auto& d : dets) labels.insert(d.label);
  MatchSet out;
  out.unknown_images = u.unknown;
  for (const auto& label : labels) {
    const auto t = detail::build_class_table(u, label, gts, dets);
    MatchSet part = detail::match_cell(t, dets, gts, iou_thr, AreaRange::kAll,
                                       SizeBuckets{}, dets.size());
    out.num_gt += part.num_gt;
    out.matched_gt += part.matched_gt;
    out.detections.insert(out.detections.end(), part.detections.begin(),
                          part.detections.end());
  }
  return out;
}

// Interpolated precision sampled at `recall_points` evenly spaced recall
// values in [0, 1]. Detections with rank >= max_det and ignored detections
// are left out. nullopt when num_gt is 0.
inline std::optional<std::vector<double>> pr_curve(
    const MatchSet& m, std::size_t num_gt, int recall_points = 101,
    std::size_t max_det = static_cast<std::size_t>(-1)) {
  if (num_gt == 0) return std::nullopt;
  if (recall_points < 2) throw InvalidArgument("recall_points must be >= 2");
  std::vector<const DetectionMatch*> pool;
  for (const auto& d : m.detections) {
    if (d.status != MatchStatus::kIgnored && d.rank < max_det) pool.push_back(&d);
  }
  std::sort(pool.begin(), pool.end(),
            [](const DetectionMatch* a, const DetectionMatch* b) {
              if (a->score != b->score) return a->score > b->score;
              return a->detection < b->detection;
            });
  const std::size_t n = pool.size();
  std::vector<double> recall(n), precision(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (pool[i]->status == MatchStatus::kTruePositive) ++tp;
    recall[i] = static_cast<double>(tp) / static_cast<double>(num_gt);
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  for (std::size_t i = n; i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  std::vector<double> sampled(recall_points, 0.0);
  for (int k = 0; k < recall_points; ++k) {
    const double r = static_cast<double>(k) / (recall_points - 1);
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sampled[k] = precision[it - recall.begin()];
  }
  return sampled;
}

inline double average_precision(const std::optional<std::vector<double>>& curve) {
  if (!curve) return kUndefinedMetric;
  double sum = 0.0;
  for (double p : *curve) sum += p;
  return sum / static_cast<double>(curve->size());
}

// Mean of the defined values; kUndefinedMetric when there are none.
inline double mean_defined(std::span<const double> values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (v > kUndefinedMetric) {
      sum += v;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : kUndefinedMetric;
}

using BucketRow = std::array<double, kNumAreaRanges>;

struct EvalResult {
  std::vector<double> iou_thresholds;
  std::vector<int> max_dets;
  std::vector<std::string> labels;
  // ap[t][range]: AP at threshold t with the largest max-dets cap.
  std::vector<BucketRow> ap;
  // ar[m][range]: recall averaged over thresholds, cap max_dets[m].
  std::vector<BucketRow> ar;
  // In-range ground truth per bucket, summed over classes.
  std::array<std::size_t, kNumAreaRanges> num_gt{};
  double m_ap = kUndefinedMetric;
  double ap_50 = kUndefinedMetric;
  double m_ar_100 = kUndefinedMetric;  // AR at the largest cap (100 by default)
  std::vector<std::string> unknown_images;

  // AP of one bucket averaged over thresholds.
  double mean_ap(AreaRange r) const {
    std::vector<double> v;
    for (const auto& row : ap) v.push_back(row[static_cast<std::size_t>(r)]);
    return mean_defined(v);
  }

  // AR of one bucket at the largest cap.
  double mean_ar(AreaRange r) const {
    return ar.empty() ? kUndefinedMetric : ar.back()[static_cast<std::size_t>(r)];
  }
};

// Full evaluation. Detections below cfg.score_floor are dropped first.
// `workers` parallelizes over cells; results do not depend on it.
inline EvalResult evaluate(std::span<const Detection> detections,
                           const Dataset& gt, const EvalConfig& cfg = {},
                           int workers = 1) {
  cfg.validate();
  std::vector<Detection> dets;
  for (const auto& d : detections) {
    if (!d.box.valid() || !(d.score >= 0.0 && d.score <= 1.0)) {
      throw InvalidArgument("invalid detection on image '" + d.image_id + "'");
    }
    if (d.score >= cfg.score_floor) dets.push_back(d);
  }
  std::vector<std::string> known;
  for (const auto& im : gt.images) known.push_back(im.image_id);
  const auto universe = detail::build_universe(known, dets);

  std::set<std::string> label_set;
  for (const auto& a : gt.annotations) label_set.insert(a.label);
  for (const auto& d : dets) label_set.insert(d.label);

  EvalResult res;
  res.iou_thresholds = cfg.iou_thresholds;
  res.max_dets = cfg.max_dets;
  res.labels.assign(label_set.begin(), label_set.end());
  res.unknown_images = universe.unknown;

  const std::size_t nc = res.labels.size();
  const std::size_t nt = cfg.iou_thresholds.size();
  const std::size_t nm = cfg.max_dets.size();
  const std::size_t max_det_cap = static_cast<std::size_t>(cfg.max_dets.back());

  std::vector<detail::ClassTable> tables(nc);
  parallel_for(nc, workers, [&](std::size_t c) {
    tables[c] = detail::build_class_table(universe, res.labels[c],
                                          gt.annotations, dets);
  });

  // Per (class, range, threshold): AP and recall per cap.
  struct Cell {
    double ap = kUndefinedMetric;
    std::vector<double> recall;
    std::size_t num_gt = 0;
  };
  std::vector<Cell> cells(nc * kNumAreaRanges * nt);
  const auto cell_index = [&](std::size_t c, std::size_t a, std::size_t t) {
    return (c * kNumAreaRanges + a) * nt + t;
  };
  parallel_for(cells.size(), workers, [&](std::size_t idx) {
    const std::size_t t = idx % nt;
    const std::size_t a = (idx / nt) % kNumAreaRanges;
    const std::size_t c = idx / (nt * kNumAreaRanges);
    const MatchSet m =
        detail::match_cell(tables[c], dets, gt.annotations, cfg.iou_thresholds[t],
                           kAreaRanges[a], cfg.buckets, max_det_cap);
    Cell& cell = cells[cell_index(c, a, t)];
    cell.num_gt = m.num_gt;
    cell.ap = average_precision(pr_curve(m, m.num_gt, cfg.recall_points, max_det_cap));
    cell.recall.assign(nm, kUndefinedMetric);
    if (m.num_gt == 0) return;
    for (std::size_t k = 0; k < nm; ++k) {
      const auto cap = static_cast<std::size_t>(cfg.max_dets[k]);
      std::size_t tp = 0;
      for (const auto& d : m.detections) {
        if (d.status == MatchStatus::kTruePositive && d.rank < cap) ++tp;
      }
      cell.recall[k] = static_cast<double>(tp) / static_cast<double>(m.num_gt);
    }
  });

  res.ap.assign(nt, BucketRow{});
  res.ar.assign(nm, BucketRow{});
  for (std::size_t a = 0; a < kNumAreaRanges; ++a) {
    for (std::size_t c = 0; c < nc; ++c) res.num_gt[a] += cells[cell_index(c, a, 0)].num_gt;
    for (std::size_t t = 0; t < nt; ++t) {
      std::vector<double> per_class;
      for (std::size_t c = 0; c < nc; ++c) per_class.push_back(cells[cell_index(c, a, t)].ap);
      res.ap[t][a] = mean_defined(per_class);
    }
    for (std::size_t k = 0; k < nm; ++k) {
      std::vector<double> per_class;
      for (std::size_t c = 0; c < nc; ++c) {
        std::vector<double> per_thr;
        for (std::size_t t = 0; t < nt; ++t) {
          per_thr.push_back(cells[cell_index(c, a, t)].recall[k]);
        }
        per_class.push_back(mean_defined(per_thr));
      }
      res.ar[k][a] = mean_defined(per_class);
    }
  }

  res.m_ap = res.mean_ap(AreaRange::kAll);
  for (std::size_t t = 0; t < nt; ++t) {
    if (std::abs(cfg.iou_thresholds[t] - 0.5) < 1e-12) res.ap_50 = res.ap[t][0];
  }
  res.m_ar_100 = res.mean_ar(AreaRange::kAll);
  return res;
}

}  // namespace weldqa
