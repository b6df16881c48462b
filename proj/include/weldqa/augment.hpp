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
// Offline dataset scaling. Every generated image gets a random pair of
// distinct augmentation ops applied in sampled order. A scaled dataset holds
// the originals plus (k - 1) replicas per source image, k * N images total.
//
// All randomness for one replica comes from a seed hashed from
// (master_seed, image_id, replica, attempt), so replicas can be produced in
// any order on any number of threads with identical results.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "weldqa/dataset.hpp"
#include "weldqa/error.hpp"
#include "weldqa/geometry.hpp"
#include "weldqa/parallel.hpp"
#include "weldqa/random.hpp"
#include "weldqa/raster.hpp"

namespace weldqa {

enum class OpFamily {
  kScaleTranslate,
  kFlipH,
  kFlipV,
  kGaussianBlur,
  kContrast,
  kGaussianNoise,
};

inline constexpr std::array<OpFamily, 6> kAllOpFamilies{
    OpFamily::kScaleTranslate, OpFamily::kFlipH,    OpFamily::kFlipV,
    OpFamily::kGaussianBlur,   OpFamily::kContrast, OpFamily::kGaussianNoise};

inline std::string_view to_string(OpFamily f) {
  switch (f) {
    case OpFamily::kScaleTranslate:
      return "scale_translate";
    case OpFamily::kFlipH:
      return "flip_h";
    case OpFamily::kFlipV:
      return "flip_v";
    case OpFamily::kGaussianBlur:
      return "gaussian_blur";
    case OpFamily::kContrast:
      return "contrast";
    case OpFamily::kGaussianNoise:
      return "gaussian_noise";
  }
  return "?";
}

inline OpFamily parse_op_family(std::string_view s) {
  for (OpFamily f : kAllOpFamilies) {
    if (to_string(f) == s) return f;
  }
  throw InvalidArgument("unknown augmentation op '" + std::string(s) + "'");
}

// Translations are fractions of the image width/height.
struct ScaleTranslate {
  double scale_x = 1.0;
  double scale_y = 1.0;
  double translate_x = 0.0;
  double translate_y = 0.0;
};
struct FlipH {};
struct FlipV {};
struct GaussianBlurOp {
  double sigma = 0.0;
};
struct ContrastOp {
  double factor = 1.0;
};
struct GaussianNoiseOp {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

using AugmentOp = std::variant<ScaleTranslate, FlipH, FlipV, GaussianBlurOp,
                               ContrastOp, GaussianNoiseOp>;

inline OpFamily family_of(const AugmentOp& op) {
  return static_cast<OpFamily>(op.index());
}

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct AugmentRanges {
  Range scale{0.8, 1.2};
  Range translate{-0.1, 0.1};
  Range blur_sigma{0.5, 2.0};
  Range contrast{0.6, 1.4};
  Range noise_sigma{2.0, 12.0};
};

struct AugmentPlan {
  std::vector<OpFamily> op_pool{kAllOpFamilies.begin(), kAllOpFamilies.end()};
  int combo_size = 2;
  int scale_factor = 2;
  std::uint64_t master_seed = 0;
  AugmentRanges ranges;
  double min_box_area = kDefaultMinBoxArea;
  std::uint8_t fill = 0;
  NoiseChannels noise_channels = NoiseChannels::kIndependent;
  // Draws per replica before a box-free result is accepted.
  int max_attempts = 10;

  void validate() const {
    if (combo_size != 2) throw InvalidArgument("combo size must be 2");
    if (scale_factor < 1) throw InvalidArgument("scale factor must be >= 1");
    if (max_attempts < 1) throw InvalidArgument("max attempts must be >= 1");
    std::vector<OpFamily> sorted = op_pool;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw InvalidArgument("op pool lists a family twice");
    }
    if (sorted.size() < 2) {
      throw InvalidArgument("op pool needs at least two distinct families");
    }
    const auto check = [](const Range& r, const char* what, bool positive) {
      if (!(r.lo <= r.hi) || (positive && !(r.lo > 0.0))) {
        throw InvalidArgument(std::string("bad ") + what + " range");
      }
    };
    check(ranges.scale, "scale", true);
    check(ranges.translate, "translate", false);
    check(ranges.blur_sigma, "blur sigma", false);
    check(ranges.contrast, "contrast", true);
    check(ranges.noise_sigma, "noise sigma", false);
    if (ranges.blur_sigma.lo < 0.0 || ranges.noise_sigma.lo < 0.0) {
      throw InvalidArgument("sigma ranges must be nonnegative");
    }
  }
};

inline std::uint64_t replica_seed(std::uint64_t master_seed,
                                  std::string_view image_id, int replica,
                                  int attempt) {
  return StableHasher()
      .add(master_seed)
      .add(image_id)
      .add(static_cast<std::uint64_t>(replica))
      .add(static_cast<std::uint64_t>(attempt))
      .digest();
}

struct Combo {
  std::array<AugmentOp, 2> ops;
  std::uint64_t seed = 0;
};

inline AugmentOp sample_op(OpFamily f, const AugmentRanges& r, Rng& rng) {
  switch (f) {
    case OpFamily::kScaleTranslate: {
      ScaleTranslate st;
      st.scale_x = rng.uniform(r.scale.lo, r.scale.hi);
      st.scale_y = rng.uniform(r.scale.lo, r.scale.hi);
      st.translate_x = rng.uniform(r.translate.lo, r.translate.hi);
      st.translate_y = rng.uniform(r.translate.lo, r.translate.hi);
      return st;
    }
    case OpFamily::kFlipH:
      return FlipH{};
    case OpFamily::kFlipV:
      return FlipV{};
    case OpFamily::kGaussianBlur:
      return GaussianBlurOp{rng.uniform(r.blur_sigma.lo, r.blur_sigma.hi)};
    case OpFamily::kContrast:
      return ContrastOp{rng.uniform(r.contrast.lo, r.contrast.hi)};
    case OpFamily::kGaussianNoise: {
      const double sigma = rng.uniform(r.noise_sigma.lo, r.noise_sigma.hi);
      return GaussianNoiseOp{sigma, rng.next_u64()};
    }
  }
  throw InvalidArgument("unknown op family");
}

// Ordered pair of distinct families drawn uniformly from the pool, each with
// parameters drawn from its range.
inline Combo sample_combo(const AugmentPlan& plan, std::string_view image_id,
                          int replica, int attempt = 0) {
  plan.validate();
  Combo c;
  c.seed = replica_seed(plan.master_seed, image_id, replica, attempt);
  Rng rng(c.seed);
  const std::uint64_t n = plan.op_pool.size();
  const std::uint64_t first = rng.below(n);
  std::uint64_t second = rng.below(n - 1);
  if (second >= first) ++second;
  c.ops[0] = sample_op(plan.op_pool[first], plan.ranges, rng);
  c.ops[1] = sample_op(plan.op_pool[second], plan.ranges, rng);
  return c;
}

struct Provenance {
  std::string image_id;
  std::string source_image_id;
  int replica_index = 0;  // 0 marks the unmodified original
  int attempt = 0;
  std::uint64_t seed = 0;
  std::vector<AugmentOp> ops;
};

struct ApplyOptions {
  double min_box_area = kDefaultMinBoxArea;
  std::uint8_t fill = 0;
  NoiseChannels noise_channels = NoiseChannels::kIndependent;
};

inline LabeledRaster apply_op(const LabeledRaster& in, const AugmentOp& op,
                              const ApplyOptions& opts) {
  const Raster& r = in.raster;
  return std::visit(
      [&](const auto& o) -> LabeledRaster {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, ScaleTranslate>) {
          const AffineMap m = AffineMap::scale_about(
              o.scale_x, o.scale_y, r.width / 2.0, r.height / 2.0,
              o.translate_x * r.width, o.translate_y * r.height);
          return affine_warp(r, m, in.annotations, opts.fill, opts.min_box_area);
        } else if constexpr (std::is_same_v<T, FlipH>) {
          return flip(r, FlipAxis::kHorizontal, in.annotations);
        } else if constexpr (std::is_same_v<T, FlipV>) {
          return flip(r, FlipAxis::kVertical, in.annotations);
        } else if constexpr (std::is_same_v<T, GaussianBlurOp>) {
          return {gaussian_blur(r, o.sigma), in.annotations};
        } else if constexpr (std::is_same_v<T, ContrastOp>) {
          return {adjust_contrast(r, o.factor), in.annotations};
        } else {
          return {add_gaussian_noise(r, o.sigma, o.seed, opts.noise_channels),
                  in.annotations};
        }
      },
      op);
}

struct AugmentedImage {
  Raster raster;
  std::vector<Annotation> annotations;
  Provenance provenance;
};

// Applies the combo's ops in order. Geometric ops move, clip and may drop
// boxes; photometric ops leave boxes untouched.
inline AugmentedImage augment_one(const Raster& raster,
                                  const std::vector<Annotation>& anns,
                                  const Combo& combo,
                                  const ApplyOptions& opts = {}) {
  LabeledRaster cur{raster, anns};
  for (const auto& op : combo.ops) cur = apply_op(cur, op, opts);
  AugmentedImage out;
  out.raster = std::move(cur.raster);
  out.annotations = std::move(cur.annotations);
  out.provenance.seed = combo.seed;
  out.provenance.ops.assign(combo.ops.begin(), combo.ops.end());
  return out;
}

inline std::string replica_image_id(std::string_view source_id, int replica) {
  return std::string(source_id) + "_aug" + std::to_string(replica);
}

struct ScaledDataset {
  Dataset dataset;
  // Parallel to dataset.images.
  std::vector<Provenance> provenance;
  std::vector<std::string> warnings;
};

// One image of the scaled dataset as handed to a sink. For originals
// (provenance.replica_index == 0) `raster` is the unmodified source.
struct GeneratedImage {
  const ImageRecord& source;
  const ImageRecord& record;
  const Raster& raster;
  const Provenance& provenance;
};

using RasterSource = std::function<Raster(const ImageRecord&)>;
// May be called concurrently from worker threads, once per output image.
using RasterSink = std::function<void(const GeneratedImage&)>;

// Builds the k-times dataset. Output images are ordered by
// (source image_id, replica); generated records get file name
// "<id>_aug<r>.png". Results do not depend on `workers`.
inline ScaledDataset scale_dataset(const Dataset& d, const AugmentPlan& plan,
                                   const RasterSource& load,
                                   const RasterSink& store, int workers = 1) {
  plan.validate();
  d.validate();
  const ApplyOptions opts{plan.min_box_area, plan.fill, plan.noise_channels};

  std::vector<const ImageRecord*> sources;
  for (const auto& im : d.images) sources.push_back(&im);
  std::sort(sources.begin(), sources.end(),
            [](const ImageRecord* a, const ImageRecord* b) {
              return a->image_id < b->image_id;
            });
  std::map<std::string, std::vector<Annotation>, std::less<>> by_image;
  for (const auto& a : d.annotations) by_image[a.image_id].push_back(a);

  struct Slot {
    std::vector<ImageRecord> records;
    std::vector<std::vector<Annotation>> annotations;
    std::vector<Provenance> provenance;
    std::vector<std::string> warnings;
  };
  std::vector<Slot> slots(sources.size());

  parallel_for(sources.size(), workers, [&](std::size_t i) {
    const ImageRecord& src = *sources[i];
    const auto it = by_image.find(src.image_id);
    const std::vector<Annotation> anns =
        it == by_image.end() ? std::vector<Annotation>{} : it->second;
    const Raster raster = load(src);
    if (raster.width != src.width || raster.height != src.height) {
      throw InvalidArgument("image '" + src.image_id +
                            "' does not match its annotated size");
    }
    Slot& slot = slots[i];

    ImageRecord orig = src;
    orig.file_path = src.file_path.filename();
    orig.channels = raster.channels;
    Provenance orig_prov;
    orig_prov.image_id = src.image_id;
    orig_prov.source_image_id = src.image_id;
    slot.records.push_back(orig);
    slot.annotations.push_back(anns);
    slot.provenance.push_back(orig_prov);
    store({src, slot.records.back(), raster, slot.provenance.back()});

    for (int r = 1; r < plan.scale_factor; ++r) {
      AugmentedImage img;
      int attempt = 0;
      for (; attempt < plan.max_attempts; ++attempt) {
        img = augment_one(raster, anns,
                          sample_combo(plan, src.image_id, r, attempt), opts);
        if (anns.empty() || !img.annotations.empty()) break;
      }
      if (attempt == plan.max_attempts) {
        attempt = plan.max_attempts - 1;
        slot.warnings.push_back(replica_image_id(src.image_id, r) +
                                ": every attempt dropped all boxes; "
                                "emitted without annotations");
      }
      ImageRecord rec;
      rec.image_id = replica_image_id(src.image_id, r);
      rec.file_path = rec.image_id + ".png";
      rec.width = img.raster.width;
      rec.height = img.raster.height;
      rec.channels = img.raster.channels;
      for (auto& a : img.annotations) a.image_id = rec.image_id;
      img.provenance.image_id = rec.image_id;
      img.provenance.source_image_id = src.image_id;
      img.provenance.replica_index = r;
      img.provenance.attempt = attempt;
      slot.records.push_back(rec);
      slot.annotations.push_back(std::move(img.annotations));
      slot.provenance.push_back(std::move(img.provenance));
      store({src, slot.records.back(), img.raster, slot.provenance.back()});
    }
  });

  ScaledDataset out;
  out.dataset.split_tag = d.split_tag;
  for (auto& slot : slots) {
    for (std::size_t j = 0; j < slot.records.size(); ++j) {
      out.dataset.images.push_back(std::move(slot.records[j]));
      for (auto& a : slot.annotations[j]) {
        out.dataset.annotations.push_back(std::move(a));
      }
      out.provenance.push_back(std::move(slot.provenance[j]));
    }
    for (auto& w : slot.warnings) out.warnings.push_back(std::move(w));
  }
  return out;
}

struct InMemoryScaled {
  ScaledDataset scaled;
  std::map<std::string, Raster> rasters;  // keyed by image_id
};

// Convenience overload over rasters held in memory, keyed by image_id.
inline InMemoryScaled scale_dataset(const Dataset& d, const AugmentPlan& plan,
                                    const std::map<std::string, Raster>& rasters,
                                    int workers = 1) {
  InMemoryScaled out;
  std::mutex mu;
  out.scaled = scale_dataset(
      d, plan,
      [&](const ImageRecord& rec) {
        const auto it = rasters.find(rec.image_id);
        if (it == rasters.end()) {
          throw InvalidArgument("no raster for image '" + rec.image_id + "'");
        }
        return it->second;
      },
      [&](const GeneratedImage& g) {
        std::lock_guard lock(mu);
        out.rasters[g.record.image_id] = g.raster;
      },
      workers);
  return out;
}

inline nlohmann::ordered_json op_to_json(const AugmentOp& op) {
  nlohmann::ordered_json j;
  j["op"] = std::string(to_string(family_of(op)));
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, ScaleTranslate>) {
          j["scale_x"] = o.scale_x;
          j["scale_y"] = o.scale_y;
          j["translate_x"] = o.translate_x;
          j["translate_y"] = o.translate_y;
        } else if constexpr (std::is_same_v<T, GaussianBlurOp>) {
          j["sigma"] = o.sigma;
        } else if constexpr (std::is_same_v<T, ContrastOp>) {
          j["factor"] = o.factor;
        } else if constexpr (std::is_same_v<T, GaussianNoiseOp>) {
          j["sigma"] = o.sigma;
          j["seed"] = o.seed;
        }
      },
      op);
  return j;
}

inline nlohmann::ordered_json provenance_to_json(const Provenance& p) {
  nlohmann::ordered_json j;
  j["image_id"] = p.image_id;
  j["source_image_id"] = p.source_image_id;
  j["replica"] = p.replica_index;
  j["attempt"] = p.attempt;
  j["seed"] = p.seed;
  j["ops"] = nlohmann::ordered_json::array();
  for (const auto& op : p.ops) j["ops"].push_back(op_to_json(op));
  return j;
}

// One JSON record per line.
inline std::string format_provenance(const std::vector<Provenance>& records) {
  std::string out;
  for (const auto& p : records) {
    out += provenance_to_json(p).dump();
    out += '\n';
  }
  return out;
}

// Size breakdown of several datasets, one row each.
struct BucketReport {
  SizeBuckets buckets;
  std::vector<std::pair<std::string, SizeHistogram>> rows;

  // Plain-text table, one row per dataset and one column per bucket.
  std::string to_text() const {
    const auto thr = [](double a) {
      const double side = std::round(std::sqrt(a));
      std::ostringstream o;
      if (side * side == a) {
        o << static_cast<long>(side) << "^2px";
      } else {
        o << a << "px";
      }
      return o.str();
    };
    const std::string s = thr(buckets.small_max_area);
    const std::string l = thr(buckets.large_min_area);
    const std::array<std::string, 4> head{
        "Dataset", "Small Pores (pore<" + s + ")",
        "Medium Pores (" + s + "<pore<" + l + ")", "Large Pores (pore>" + l + ")"};
    std::array<std::size_t, 4> width{};
    for (int c = 0; c < 4; ++c) width[c] = head[c].size();
    for (const auto& [name, h] : rows) {
      width[0] = std::max(width[0], name.size());
      width[1] = std::max(width[1], std::to_string(h.small).size());
      width[2] = std::max(width[2], std::to_string(h.medium).size());
      width[3] = std::max(width[3], std::to_string(h.large).size());
    }
    std::ostringstream o;
    const auto line = [&](const std::array<std::string, 4>& cells) {
      o << '|';
      for (int c = 0; c < 4; ++c) {
        o << ' ' << std::setw(static_cast<int>(width[c]))
          << (c == 0 ? std::left : std::right) << cells[c] << " |";
      }
      o << '\n';
    };
    line(head);
    o << '|';
    for (int c = 0; c < 4; ++c) o << std::string(width[c] + 2, '-') << '|';
    o << '\n';
    for (const auto& [name, h] : rows) {
      line({name, std::to_string(h.small), std::to_string(h.medium),
            std::to_string(h.large)});
    }
    return o.str();
  }

  std::string to_csv() const {
    std::string out = "dataset,small,medium,large\n";
    for (const auto& [name, h] : rows) {
      out += name + ',' + std::to_string(h.small) + ',' +
             std::to_string(h.medium) + ',' + std::to_string(h.large) + '\n';
    }
    return out;
  }
};

inline BucketReport bucket_report(
    const std::vector<std::pair<std::string, Dataset>>& datasets,
    const SizeBuckets& k = {}) {
  k.validate();
  BucketReport r;
  r.buckets = k;
  for (const auto& [name, d] : datasets) {
    r.rows.emplace_back(name, size_histogram(d, k));
  }
  return r;
}

}  // namespace weldqa
