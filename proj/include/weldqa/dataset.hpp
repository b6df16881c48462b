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
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "weldqa/error.hpp"
#include "weldqa/geometry.hpp"
#include "weldqa/random.hpp"

namespace weldqa {

struct ImageRecord {
  std::string image_id;
  std::filesystem::path file_path;
  int width = 0;
  int height = 0;
  int channels = 1;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct Annotation {
  std::string image_id;
  std::string label;
  BBox box;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct Detection {
  std::string image_id;
  std::string label;
  BBox box;
  double score = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

enum class SplitTag { kUnsplit, kTrain, kVal, kTest };

inline std::string_view to_string(SplitTag t) {
  switch (t) {
    case SplitTag::kTrain:
      return "train";
    case SplitTag::kVal:
      return "val";
    case SplitTag::kTest:
      return "test";
    case SplitTag::kUnsplit:
      return "unsplit";
  }
  return "?";
}

struct Dataset {
  std::vector<ImageRecord> images;
  std::vector<Annotation> annotations;
  SplitTag split_tag = SplitTag::kUnsplit;

  const ImageRecord* find_image(std::string_view id) const {
    for (const auto& im : images) {
      if (im.image_id == id) return &im;
    }
    return nullptr;
  }

  std::vector<Annotation> annotations_for(std::string_view id) const {
    std::vector<Annotation> out;
    for (const auto& a : annotations) {
      if (a.image_id == id) out.push_back(a);
    }
    return out;
  }

  // Throws InvalidArgument on duplicate ids, bad image sizes, empty labels,
  // invalid boxes or annotations that reference no image.
  void validate() const {
    std::set<std::string, std::less<>> ids;
    for (const auto& im : images) {
      if (im.width <= 0 || im.height <= 0) {
        throw InvalidArgument("image '" + im.image_id +
                              "' has non-positive size");
      }
      if (im.channels != 1 && im.channels != 3) {
        throw InvalidArgument("image '" + im.image_id +
                              "' must have 1 or 3 channels");
      }
      if (!ids.insert(im.image_id).second) {
        throw InvalidArgument("duplicate image id '" + im.image_id + "'");
      }
    }
    for (const auto& a : annotations) {
      if (!ids.contains(a.image_id)) {
        throw InvalidArgument("annotation references unknown image '" +
                              a.image_id + "'");
      }
      if (a.label.empty()) {
        throw InvalidArgument("empty label on image '" + a.image_id + "'");
      }
      if (!a.box.valid()) {
        throw InvalidArgument("invalid box on image '" + a.image_id + "'");
      }
    }
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct SizeHistogram {
  std::size_t small = 0;
  std::size_t medium = 0;
  std::size_t large = 0;

  std::size_t total() const { return small + medium + large; }

  friend bool operator==(const SizeHistogram&, const SizeHistogram&) = default;
};

inline SizeHistogram size_histogram(const Dataset& d,
                                    const SizeBuckets& k = {}) {
  SizeHistogram h;
  for (const auto& a : d.annotations) {
    switch (classify_size(a.box, k)) {
      case SizeClass::kSmall:
        ++h.small;
        break;
      case SizeClass::kMedium:
        ++h.medium;
        break;
      case SizeClass::kLarge:
        ++h.large;
        break;
    }
  }
  return h;
}

struct SplitRatios {
  double train = 1.0;
  double val = 0.0;
  double test = 0.0;
};

// Part sizes for `n` images: floor of each share, then the remainder handed
// out one at a time in train, val, test order among parts with a nonzero
// ratio.
inline std::array<std::size_t, 3> split_sizes(std::size_t n,
                                              const SplitRatios& r) {
  const std::array<double, 3> ratios{r.train, r.val, r.test};
  double sum = 0.0;
  for (double v : ratios) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("split ratios must be finite and nonnegative");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw InvalidArgument("split ratios must sum to 1, got " +
                          std::to_string(sum));
  }
  std::array<std::size_t, 3> sizes{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    // The epsilon keeps 0.7 * 10 from landing on 6.999...
    sizes[i] = static_cast<std::size_t>(
        std::floor(ratios[i] * static_cast<double>(n) + 1e-9));
    assigned += sizes[i];
  }
  std::size_t remainder = n - std::min(n, assigned);
  while (remainder > 0) {
    for (int i = 0; i < 3 && remainder > 0; ++i) {
      if (ratios[i] > 0.0) {
        ++sizes[i];
        --remainder;
      }
    }
  }
  return sizes;
}

// Deterministic partition into (train, val, test). Image ids are sorted, then
// shuffled by a seeded Fisher-Yates pass, then cut by split_sizes. Each image
// carries all its annotations; relative order inside a part follows the
// input dataset.
inline std::array<Dataset, 3> split(const Dataset& d, const SplitRatios& r,
                                    std::uint64_t seed) {
  const auto sizes = split_sizes(d.images.size(), r);

  std::vector<std::string> ids;
  ids.reserve(d.images.size());
  for (const auto& im : d.images) ids.push_back(im.image_id);
  std::sort(ids.begin(), ids.end());
  Rng rng(StableHasher().add("split").add(seed).digest());
  for (std::size_t i = ids.size(); i > 1; --i) {
    std::swap(ids[i - 1], ids[rng.below(i)]);
  }

  std::map<std::string, int, std::less<>> part_of;
  std::size_t pos = 0;
  for (int p = 0; p < 3; ++p) {
    for (std::size_t j = 0; j < sizes[p]; ++j) part_of[ids[pos++]] = p;
  }

  std::array<Dataset, 3> out;
  out[0].split_tag = SplitTag::kTrain;
  out[1].split_tag = SplitTag::kVal;
  out[2].split_tag = SplitTag::kTest;
  for (const auto& im : d.images) {
    out[part_of.at(im.image_id)].images.push_back(im);
  }
  for (const auto& a : d.annotations) {
    const auto it = part_of.find(a.image_id);
    if (it != part_of.end()) out[it->second].annotations.push_back(a);
  }
  return out;
}

}  // namespace weldqa
