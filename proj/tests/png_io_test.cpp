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
#include "weldqa/png_io.hpp"

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace weldqa {
namespace {

using testing::TempDir;

TEST(PngIoTest, GrayRoundTrip) {
  TempDir dir;
  const Raster r = testing::synthetic_raster(37, 19, {{2, 2, 9, 9}}, 4);
  write_png(r, dir / "g.png");
  EXPECT_EQ(read_png(dir / "g.png"), r);
  const PngInfo info = read_png_info(dir / "g.png");
  EXPECT_EQ(info.width, 37);
  EXPECT_EQ(info.height, 19);
  EXPECT_EQ(info.channels, 1);
}

TEST(PngIoTest, RgbRoundTrip) {
  TempDir dir;
  const Raster r = testing::synthetic_raster(20, 30, {}, 8, 3);
  write_png(r, dir / "c.png");
  EXPECT_EQ(read_png(dir / "c.png"), r);
  EXPECT_EQ(read_png_info(dir / "c.png").channels, 3);
}

TEST(PngIoTest, WritesAreByteStable) {
  TempDir dir;
  const Raster r = testing::synthetic_raster(64, 48, {{10, 10, 30, 30}}, 1);
  write_png(r, dir / "a.png");
  write_png(r, dir / "b.png");
  EXPECT_EQ(testing::read_file(dir / "a.png"), testing::read_file(dir / "b.png"));
}

TEST(PngIoTest, ErrorsNameTheFile) {
  TempDir dir;
  testing::write_file(dir / "bad.png", "not a png at all");
  try {
    read_png(dir / "bad.png");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("bad.png"), std::string::npos);
  }
  EXPECT_THROW(read_png(dir / "missing.png"), IoError);
  EXPECT_THROW(read_png_info(dir / "bad.png"), Error);
}

}  // namespace
}  // namespace weldqa
