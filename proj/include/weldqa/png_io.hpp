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

#include <png.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "weldqa/error.hpp"
#include "weldqa/raster.hpp"

namespace weldqa {

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] inline void png_throw(png_structp png, png_const_charp msg) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  if (what) *what = msg;
  png_longjmp(png, 1);
}

inline void png_silent_warning(png_structp, png_const_charp) {}

}  // namespace detail

struct PngInfo {
  int width = 0;
  int height = 0;
  int channels = 0;
};

// 8-bit grayscale or RGB PNG. Palette, 16-bit and alpha inputs are
// converted to 8-bit gray/RGB on read (alpha is stripped).
inline Raster read_png(const std::filesystem::path& path) {
  detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open image '" + path.string() + "'");
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw IoError("'" + path.string() + "' is not a PNG file");
  }
  std::string err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err,
                                           detail::png_throw,
                                           detail::png_silent_warning);
  if (!png) throw IoError("libpng init failed for '" + path.string() + "'");
  png_infop info = png_create_info_struct(png);
  Raster out;
  // Everything libpng touches after setjmp must be declared above it.
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("cannot decode '" + path.string() + "': " + err);
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  const int ch = png_get_channels(png, info);
  if (ch != 1 && ch != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("'" + path.string() + "' has unsupported channel count " +
                  std::to_string(ch));
  }
  out = Raster(w, h, ch);
  rows.resize(h);
  for (int y = 0; y < h; ++y) rows[y] = out.pixels.data() + out.index(0, y);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

// Reads only the header. Throws IoError if the file is missing or is not a
// PNG.
inline PngInfo read_png_info(const std::filesystem::path& path) {
  detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open image '" + path.string() + "'");
  unsigned char head[33];
  if (std::fread(head, 1, sizeof head, fp.get()) != sizeof head ||
      png_sig_cmp(head, 0, 8) != 0) {
    throw IoError("'" + path.string() + "' is not a PNG file");
  }
  // IHDR follows the signature: length(4) "IHDR"(4) width(4) height(4)
  // depth(1) color(1).
  const auto be32 = [&](int at) {
    return (static_cast<std::uint32_t>(head[at]) << 24) |
           (static_cast<std::uint32_t>(head[at + 1]) << 16) |
           (static_cast<std::uint32_t>(head[at + 2]) << 8) |
           static_cast<std::uint32_t>(head[at + 3]);
  };
  PngInfo info;
  info.width = static_cast<int>(be32(16));
  info.height = static_cast<int>(be32(20));
  const unsigned color = head[25];
  info.channels = (color & PNG_COLOR_MASK_COLOR) ? 3 : 1;
  return info;
}

// Writes with fixed compression settings and no timestamp chunk, so equal
// rasters give equal bytes.
inline void write_png(const Raster& r, const std::filesystem::path& path) {
  if (!r.valid()) throw InvalidArgument("cannot write an invalid raster");
  detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot create image '" + path.string() + "'");
  std::string err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err,
                                            detail::png_throw,
                                            detail::png_silent_warning);
  if (!png) throw IoError("libpng init failed for '" + path.string() + "'");
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows(r.height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("cannot encode '" + path.string() + "': " + err);
  }
  png_init_io(png, fp.get());
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, r.width, r.height, 8,
               r.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < r.height; ++y) {
    rows[y] = const_cast<png_bytep>(r.pixels.data() + r.index(0, y));
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(fp.get()) != 0) {
    throw IoError("write failed for '" + path.string() + "'");
  }
}

}  // namespace weldqa
