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
// Pixel operations used by preprocessing and augmentation. Every function is
// pure: inputs are taken by const reference and a new raster is returned.
// Operations that move pixels also move the boxes that label them.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "weldqa/dataset.hpp"
#include "weldqa/error.hpp"
#include "weldqa/geometry.hpp"
#include "weldqa/random.hpp"

namespace weldqa {

// 8-bit image, row-major, channels interleaved.
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;

  Raster() = default;
  Raster(int w, int h, int c, std::uint8_t fill = 0)
      : width(w), height(h), channels(c),
        pixels(static_cast<std::size_t>(w) * h * c, fill) {
    if (w <= 0 || h <= 0) throw InvalidArgument("raster size must be positive");
    if (c != 1 && c != 3) throw InvalidArgument("raster must have 1 or 3 channels");
  }

  std::size_t index(int x, int y, int c = 0) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }
  std::uint8_t& at(int x, int y, int c = 0) { return pixels[index(x, y, c)]; }
  std::uint8_t at(int x, int y, int c = 0) const { return pixels[index(x, y, c)]; }

  bool valid() const {
    return width > 0 && height > 0 && (channels == 1 || channels == 3) &&
           pixels.size() == static_cast<std::size_t>(width) * height * channels;
  }

  friend bool operator==(const Raster&, const Raster&) = default;
};

// Raster plus the boxes that label it, in its own pixel frame.
struct LabeledRaster {
  Raster raster;
  std::vector<Annotation> annotations;
};

// Boxes whose clipped area falls below this are dropped.
inline constexpr double kDefaultMinBoxArea = 16.0;

struct CropRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

// Window of size w x h centered in a width x height frame.
inline CropRect centered_crop(int width, int height, int w = 300, int h = 300) {
  return {(width - w) / 2, (height - h) / 2, w, h};
}

namespace detail {

inline std::uint8_t clamp_round(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::lround(v));
}

inline void require_valid(const Raster& r) {
  if (!r.valid()) throw InvalidArgument("raster buffer does not match its shape");
}

// Moves boxes through `m`, clips them to the frame and drops remnants below
// min_box_area.
inline std::vector<Annotation> propagate(const std::vector<Annotation>& anns,
                                         const AffineMap& m, int width,
                                         int height, double min_box_area) {
  std::vector<Annotation> out;
  out.reserve(anns.size());
  for (const auto& a : anns) {
    const auto clipped = clip(transform_bbox(a.box, m), width, height);
    if (!clipped || area(*clipped) < min_box_area) continue;
    out.push_back({a.image_id, a.label, *clipped});
  }
  return out;
}

}  // namespace detail

inline LabeledRaster crop(const Raster& r, const CropRect& rect,
                          const std::vector<Annotation>& anns,
                          double min_box_area = kDefaultMinBoxArea) {
  detail::require_valid(r);
  if (rect.width <= 0 || rect.height <= 0 || rect.x < 0 || rect.y < 0 ||
      rect.x + rect.width > r.width || rect.y + rect.height > r.height) {
    throw InvalidArgument(
        "crop rect (" + std::to_string(rect.x) + "," + std::to_string(rect.y) +
        "," + std::to_string(rect.width) + "," + std::to_string(rect.height) +
        ") is outside the " + std::to_string(r.width) + "x" +
        std::to_string(r.height) + " raster");
  }
  LabeledRaster out{Raster(rect.width, rect.height, r.channels), {}};
  const std::size_t row_bytes = static_cast<std::size_t>(rect.width) * r.channels;
  for (int y = 0; y < rect.height; ++y) {
    const auto src = r.pixels.begin() +
                     static_cast<std::ptrdiff_t>(r.index(rect.x, rect.y + y));
    std::copy(src, src + static_cast<std::ptrdiff_t>(row_bytes),
              out.raster.pixels.begin() +
                  static_cast<std::ptrdiff_t>(out.raster.index(0, y)));
  }
  out.annotations = detail::propagate(
      anns, AffineMap::translation(-rect.x, -rect.y), rect.width, rect.height,
      min_box_area);
  return out;
}

inline Raster gray_to_rgb(const Raster& r) {
  detail::require_valid(r);
  if (r.channels != 1) {
    throw InvalidArgument("gray_to_rgb expects a 1-channel raster, got " +
                          std::to_string(r.channels) + " channels");
  }
  Raster out(r.width, r.height, 3);
  for (std::size_t i = 0; i < r.pixels.size(); ++i) {
    out.pixels[3 * i] = out.pixels[3 * i + 1] = out.pixels[3 * i + 2] =
        r.pixels[i];
  }
  return out;
}

// Linear stretch taking the 1st-percentile sample to 0 and the
// 99th-percentile sample to 255. Percentiles are order statistics over all
// samples: indices floor(0.01*(n-1)) and ceil(0.99*(n-1)) of the sorted
// values. Constant images come back unchanged.
inline Raster normalize_contrast(const Raster& r) {
  detail::require_valid(r);
  std::array<std::size_t, 256> hist{};
  for (std::uint8_t v : r.pixels) ++hist[v];
  const std::size_t n = r.pixels.size();
  const auto nth = [&](std::size_t k) {
    std::size_t seen = 0;
    for (int v = 0; v < 256; ++v) {
      seen += hist[v];
      if (seen > k) return v;
    }
    return 255;
  };
  const double last = static_cast<double>(n - 1);
  const int lo = nth(static_cast<std::size_t>(std::floor(0.01 * last)));
  const int hi = nth(static_cast<std::size_t>(std::ceil(0.99 * last)));
  if (hi <= lo) return r;
  const double gain = 255.0 / (hi - lo);
  std::array<std::uint8_t, 256> lut{};
  for (int v = 0; v < 256; ++v) lut[v] = detail::clamp_round((v - lo) * gain);
  Raster out = r;
  for (auto& v : out.pixels) v = lut[v];
  return out;
}

// Normalized 1-D Gaussian weights for offsets -radius..radius with
// radius = ceil(3 * sigma).
inline std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (double& w : k) w /= sum;
  return k;
}

// Separable blur with clamp-to-edge borders. Intermediate values stay in
// floating point; rounding happens once at the end.
inline Raster gaussian_blur(const Raster& r, double sigma) {
  detail::require_valid(r);
  if (!(sigma >= 0.0)) throw InvalidArgument("blur sigma must be >= 0");
  if (sigma == 0.0) return r;
  const auto k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  const int w = r.width, h = r.height, ch = r.channels;
  std::vector<double> tmp(r.pixels.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          acc += k[i + radius] * r.at(std::clamp(x + i, 0, w - 1), y, c);
        }
        tmp[r.index(x, y, c)] = acc;
      }
    }
  }
  Raster out(w, h, ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          acc += k[i + radius] * tmp[r.index(x, std::clamp(y + i, 0, h - 1), c)];
        }
        out.at(x, y, c) = detail::clamp_round(acc);
      }
    }
  }
  return out;
}

// out = clamp(round((in - 128) * factor + 128)).
inline Raster adjust_contrast(const Raster& r, double factor) {
  detail::require_valid(r);
  if (!(factor > 0.0)) throw InvalidArgument("contrast factor must be > 0");
  std::array<std::uint8_t, 256> lut{};
  for (int v = 0; v < 256; ++v) {
    lut[v] = detail::clamp_round((v - 128.0) * factor + 128.0);
  }
  Raster out = r;
  for (auto& v : out.pixels) v = lut[v];
  return out;
}

enum class NoiseChannels {
  kIndependent,  // one draw per sample
  kShared,       // one draw per pixel, added to every channel
};

inline Raster add_gaussian_noise(
    const Raster& r, double sigma, std::uint64_t seed,
    NoiseChannels mode = NoiseChannels::kIndependent) {
  detail::require_valid(r);
  if (!(sigma >= 0.0)) throw InvalidArgument("noise sigma must be >= 0");
  if (sigma == 0.0) return r;
  Rng rng(seed);
  Raster out = r;
  if (mode == NoiseChannels::kShared && r.channels > 1) {
    for (std::size_t p = 0; p < out.pixels.size(); p += r.channels) {
      const double n = rng.normal(0.0, sigma);
      for (int c = 0; c < r.channels; ++c) {
        out.pixels[p + c] = detail::clamp_round(out.pixels[p + c] + n);
      }
    }
  } else {
    for (auto& v : out.pixels) v = detail::clamp_round(v + rng.normal(0.0, sigma));
  }
  return out;
}

enum class FlipAxis { kHorizontal, kVertical };

// Mirror map in continuous coordinates for a width x height frame.
inline AffineMap flip_map(FlipAxis axis, int width, int height) {
  if (axis == FlipAxis::kHorizontal) {
    return {{-1.0, 0.0, 0.0, 1.0}, {static_cast<double>(width), 0.0}};
  }
  return {{1.0, 0.0, 0.0, -1.0}, {0.0, static_cast<double>(height)}};
}

// Horizontal flips mirror columns (x -> W - x for boxes), vertical flips
// mirror rows.
inline LabeledRaster flip(const Raster& r, FlipAxis axis,
                          const std::vector<Annotation>& anns) {
  detail::require_valid(r);
  LabeledRaster out{Raster(r.width, r.height, r.channels), {}};
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      const int sx = axis == FlipAxis::kHorizontal ? r.width - 1 - x : x;
      const int sy = axis == FlipAxis::kVertical ? r.height - 1 - y : y;
      for (int c = 0; c < r.channels; ++c) out.raster.at(x, y, c) = r.at(sx, sy, c);
    }
  }
  const AffineMap m = flip_map(axis, r.width, r.height);
  out.annotations.reserve(anns.size());
  for (const auto& a : anns) {
    out.annotations.push_back({a.image_id, a.label, transform_bbox(a.box, m)});
  }
  return out;
}

// Warps onto a canvas of the same size. Each output pixel center is mapped
// back through the inverse and sampled bilinearly; centers that land outside
// the source frame get `fill`. Boxes follow transform_bbox, are clipped to
// the canvas, and are dropped below min_box_area.
inline LabeledRaster affine_warp(const Raster& r, const AffineMap& m,
                                 const std::vector<Annotation>& anns,
                                 std::uint8_t fill = 0,
                                 double min_box_area = kDefaultMinBoxArea) {
  detail::require_valid(r);
  if (!m.invertible()) throw InvalidArgument("affine map is singular");
  const AffineMap inv = m.inverse();
  const int w = r.width, h = r.height, ch = r.channels;
  LabeledRaster out{Raster(w, h, ch, fill), {}};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Point s = inv.apply({x + 0.5, y + 0.5});
      if (s.x < 0.0 || s.y < 0.0 || s.x > w || s.y > h) continue;
      const double fx = s.x - 0.5;
      const double fy = s.y - 0.5;
      const int x0 = static_cast<int>(std::floor(fx));
      const int y0 = static_cast<int>(std::floor(fy));
      const double tx = fx - x0;
      const double ty = fy - y0;
      const int xa = std::clamp(x0, 0, w - 1), xb = std::clamp(x0 + 1, 0, w - 1);
      const int ya = std::clamp(y0, 0, h - 1), yb = std::clamp(y0 + 1, 0, h - 1);
      for (int c = 0; c < ch; ++c) {
        const double top = (1.0 - tx) * r.at(xa, ya, c) + tx * r.at(xb, ya, c);
        const double bot = (1.0 - tx) * r.at(xa, yb, c) + tx * r.at(xb, yb, c);
        out.raster.at(x, y, c) = detail::clamp_round((1.0 - ty) * top + ty * bot);
      }
    }
  }
  out.annotations = detail::propagate(anns, m, w, h, min_box_area);
  return out;
}

}  // namespace weldqa
