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
#include <optional>
#include <string_view>

#include "weldqa/error.hpp"

namespace weldqa {

// Axis-aligned box in continuous pixel coordinates. Origin is the top-left
// corner of the image, x grows right and y grows down. A pixel (i, j) covers
// [i, i+1) x [j, j+1).
struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }

  bool valid() const {
    return std::isfinite(x_min) && std::isfinite(y_min) &&
           std::isfinite(x_max) && std::isfinite(y_max) && x_min <= x_max &&
           y_min <= y_max;
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

inline double area(const BBox& b) { return b.width() * b.height(); }

inline double intersection_area(const BBox& a, const BBox& b) {
  const double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

// Intersection over union. A zero-area union yields 0 rather than NaN.
inline double iou(const BBox& a, const BBox& b) {
  const double inter = intersection_area(a, b);
  const double uni = area(a) + area(b) - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

enum class SizeClass { kSmall = 0, kMedium = 1, kLarge = 2 };

inline std::string_view to_string(SizeClass c) {
  switch (c) {
    case SizeClass::kSmall:
      return "small";
    case SizeClass::kMedium:
      return "medium";
    case SizeClass::kLarge:
      return "large";
  }
  return "?";
}

// Area thresholds separating the small / medium / large object classes.
// Defaults are 32^2 and 64^2 px^2.
struct SizeBuckets {
  double small_max_area = 32.0 * 32.0;
  double large_min_area = 64.0 * 64.0;

  void validate() const {
    if (!(small_max_area > 0.0 && small_max_area < large_min_area)) {
      throw InvalidArgument("size buckets require 0 < small < large, got " +
                            std::to_string(small_max_area) + ", " +
                            std::to_string(large_min_area));
    }
  }
};

// Boundary areas (exactly small_max_area or large_min_area) are medium.
inline SizeClass classify_size(const BBox& b, const SizeBuckets& k = {}) {
  const double a = area(b);
  if (a < k.small_max_area) return SizeClass::kSmall;
  if (a > k.large_min_area) return SizeClass::kLarge;
  return SizeClass::kMedium;
}

// Intersection of `b` with the frame [0,width] x [0,height]; nullopt when
// nothing of positive area is left.
inline std::optional<BBox> clip(const BBox& b, double width, double height) {
  BBox out{std::clamp(b.x_min, 0.0, width), std::clamp(b.y_min, 0.0, height),
           std::clamp(b.x_max, 0.0, width), std::clamp(b.y_max, 0.0, height)};
  if (out.x_max <= out.x_min || out.y_max <= out.y_min) return std::nullopt;
  return out;
}

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// p' = linear * p + offset, with linear stored row-major as
// [a00 a01; a10 a11].
struct AffineMap {
  std::array<double, 4> linear{1.0, 0.0, 0.0, 1.0};
  std::array<double, 2> offset{0.0, 0.0};

  static AffineMap identity() { return {}; }

  static AffineMap translation(double tx, double ty) {
    return {{1.0, 0.0, 0.0, 1.0}, {tx, ty}};
  }

  static AffineMap scaling(double sx, double sy) {
    return {{sx, 0.0, 0.0, sy}, {0.0, 0.0}};
  }

  // Scale by (sx, sy) about (cx, cy), then shift by (tx, ty).
  static AffineMap scale_about(double sx, double sy, double cx, double cy,
                               double tx = 0.0, double ty = 0.0) {
    return {{sx, 0.0, 0.0, sy}, {cx - sx * cx + tx, cy - sy * cy + ty}};
  }

  double determinant() const {
    return linear[0] * linear[3] - linear[1] * linear[2];
  }

  bool finite() const {
    return std::all_of(linear.begin(), linear.end(),
                       [](double v) { return std::isfinite(v); }) &&
           std::isfinite(offset[0]) && std::isfinite(offset[1]);
  }

  bool invertible() const { return finite() && determinant() != 0.0; }

  Point apply(Point p) const {
    return {linear[0] * p.x + linear[1] * p.y + offset[0],
            linear[2] * p.x + linear[3] * p.y + offset[1]};
  }

  AffineMap inverse() const {
    if (!invertible()) throw InvalidArgument("affine map is singular");
    const double det = determinant();
    const std::array<double, 4> inv{linear[3] / det, -linear[1] / det,
                                    -linear[2] / det, linear[0] / det};
    return {inv,
            {-(inv[0] * offset[0] + inv[1] * offset[1]),
             -(inv[2] * offset[0] + inv[3] * offset[1])}};
  }

  // (this ∘ first): apply `first`, then this map.
  AffineMap after(const AffineMap& first) const {
    const auto& a = linear;
    const auto& b = first.linear;
    return {{a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
             a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]},
            {a[0] * first.offset[0] + a[1] * first.offset[1] + offset[0],
             a[2] * first.offset[0] + a[3] * first.offset[1] + offset[1]}};
  }
};

// Axis-aligned hull of the four mapped corners.
inline BBox transform_bbox(const BBox& b, const AffineMap& m) {
  const std::array<Point, 4> corners{
      m.apply({b.x_min, b.y_min}), m.apply({b.x_max, b.y_min}),
      m.apply({b.x_min, b.y_max}), m.apply({b.x_max, b.y_max})};
  BBox out{corners[0].x, corners[0].y, corners[0].x, corners[0].y};
  for (const Point& p : corners) {
    out.x_min = std::min(out.x_min, p.x);
    out.y_min = std::min(out.y_min, p.y);
    out.x_max = std::max(out.x_max, p.x);
    out.y_max = std::max(out.y_max, p.y);
  }
  return out;
}

}  // namespace weldqa
