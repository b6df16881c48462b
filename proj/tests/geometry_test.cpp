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
#include "weldqa/geometry.hpp"

#include <gtest/gtest.h>

#include <random>

namespace weldqa {
namespace {

// Counts unit pixels covered by the intersection and union of two integer
// boxes; the ratio is the IoU.
double raster_iou(const BBox& a, const BBox& b) {
  long inter = 0, uni = 0;
  const int x0 = static_cast<int>(std::min(a.x_min, b.x_min));
  const int x1 = static_cast<int>(std::max(a.x_max, b.x_max));
  const int y0 = static_cast<int>(std::min(a.y_min, b.y_min));
  const int y1 = static_cast<int>(std::max(a.y_max, b.y_max));
  const auto in = [](const BBox& r, int x, int y) {
    return x >= r.x_min && x + 1 <= r.x_max && y >= r.y_min && y + 1 <= r.y_max;
  };
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const bool ia = in(a, x, y), ib = in(b, x, y);
      inter += ia && ib;
      uni += ia || ib;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

TEST(AreaTest, Examples) {
  EXPECT_EQ(area({0, 0, 0, 0}), 0.0);
  EXPECT_EQ(area({0, 0, 40, 40}), 1600.0);
  EXPECT_EQ(area({10, 5, 74, 69}), 4096.0);
}

TEST(IouTest, Examples) {
  EXPECT_EQ(iou({3, 4, 20, 30}, {3, 4, 20, 30}), 1.0);
  EXPECT_EQ(iou({0, 0, 10, 10}, {20, 20, 30, 30}), 0.0);
  EXPECT_NEAR(iou({0, 0, 10, 10}, {5, 0, 15, 10}), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(raster_iou({0, 0, 10, 10}, {5, 0, 15, 10}), 1.0 / 3.0, 1e-12);
}

TEST(IouTest, DegenerateBoxesGiveZero) {
  EXPECT_EQ(iou({0, 0, 0, 0}, {0, 0, 0, 0}), 0.0);
  EXPECT_EQ(iou({5, 5, 5, 9}, {0, 0, 10, 10}), 0.0);
}

TEST(IouTest, TouchingEdgesDoNotOverlap) {
  EXPECT_EQ(iou({0, 0, 10, 10}, {10, 0, 20, 10}), 0.0);
}

TEST(IouTest, MatchesRasterizationAndIsSymmetric) {
  std::mt19937_64 eng(11);
  std::uniform_int_distribution<int> c(0, 120);
  for (int i = 0; i < 300; ++i) {
    int ax = c(eng), ay = c(eng), bx = c(eng), by = c(eng);
    const BBox a{double(ax), double(ay), double(ax + c(eng) % 40), double(ay + c(eng) % 40)};
    const BBox b{double(bx), double(by), double(bx + c(eng) % 40), double(by + c(eng) % 40)};
    const double v = iou(a, b);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_EQ(v, iou(b, a));
    EXPECT_NEAR(v, raster_iou(a, b), 1e-9);
  }
}

TEST(ClassifySizeTest, TableThresholds) {
  const SizeBuckets k;
  EXPECT_EQ(classify_size({0, 0, 30, 30}, k), SizeClass::kSmall);
  EXPECT_EQ(classify_size({0, 0, 40, 40}, k), SizeClass::kMedium);
  EXPECT_EQ(classify_size({0, 0, 70, 70}, k), SizeClass::kLarge);
}

TEST(ClassifySizeTest, BoundariesAreMedium) {
  const SizeBuckets k;
  EXPECT_EQ(classify_size({0, 0, 32, 32}, k), SizeClass::kMedium);
  EXPECT_EQ(classify_size({0, 0, 64, 64}, k), SizeClass::kMedium);
  EXPECT_EQ(classify_size({0, 0, 31.99, 32}, k), SizeClass::kSmall);
  EXPECT_EQ(classify_size({0, 0, 64.01, 64}, k), SizeClass::kLarge);
}

TEST(ClassifySizeTest, PartitionsEveryArea) {
  const SizeBuckets k{100, 400};
  int counts[3] = {0, 0, 0};
  for (int s = 1; s <= 30; ++s) {
    ++counts[static_cast<int>(classify_size({0, 0, double(s), double(s)}, k))];
  }
  EXPECT_EQ(counts[0], 9);   // 1..9
  EXPECT_EQ(counts[1], 11);  // 10..20
  EXPECT_EQ(counts[2], 10);  // 21..30
}

TEST(SizeBucketsTest, RejectsBadThresholds) {
  EXPECT_THROW((SizeBuckets{0, 10}.validate()), InvalidArgument);
  EXPECT_THROW((SizeBuckets{10, 10}.validate()), InvalidArgument);
  EXPECT_NO_THROW(SizeBuckets{}.validate());
}

TEST(ClipTest, Examples) {
  EXPECT_EQ(clip({-5, -5, 10, 10}, 300, 300), (BBox{0, 0, 10, 10}));
  EXPECT_FALSE(clip({310, 0, 320, 10}, 300, 300).has_value());
  EXPECT_EQ(clip({0, 0, 100, 100}, 300, 300), (BBox{0, 0, 100, 100}));
}

TEST(ClipTest, IdempotentAndInsideFrame) {
  std::mt19937_64 eng(5);
  std::uniform_real_distribution<double> u(-100, 400);
  for (int i = 0; i < 500; ++i) {
    double x0 = u(eng), x1 = u(eng), y0 = u(eng), y1 = u(eng);
    const BBox b{std::min(x0, x1), std::min(y0, y1), std::max(x0, x1), std::max(y0, y1)};
    const auto c = clip(b, 300, 200);
    if (!c) continue;
    EXPECT_GE(c->x_min, 0.0);
    EXPECT_GE(c->y_min, 0.0);
    EXPECT_LE(c->x_max, 300.0);
    EXPECT_LE(c->y_max, 200.0);
    EXPECT_EQ(clip(*c, 300, 200), c);
  }
}

TEST(TransformBboxTest, Examples) {
  EXPECT_EQ(transform_bbox({1, 2, 3, 4}, AffineMap::identity()), (BBox{1, 2, 3, 4}));
  EXPECT_EQ(transform_bbox({0, 0, 10, 10}, AffineMap::translation(10, 5)),
            (BBox{10, 5, 20, 15}));
  EXPECT_EQ(transform_bbox({1, 1, 3, 3}, AffineMap::scaling(2, 2)), (BBox{2, 2, 6, 6}));
}

TEST(TransformBboxTest, NegativeScaleKeepsOrder) {
  const BBox b = transform_bbox({10, 20, 50, 60}, {{-1, 0, 0, 1}, {300, 0}});
  EXPECT_EQ(b, (BBox{250, 20, 290, 60}));
  EXPECT_TRUE(b.valid());
}

TEST(AffineMapTest, InverseAndComposition) {
  const AffineMap m = AffineMap::scale_about(1.1, 0.9, 150, 150, 7, -3);
  const AffineMap id = m.inverse().after(m);
  const Point p = id.apply({12.5, 99.0});
  EXPECT_NEAR(p.x, 12.5, 1e-12);
  EXPECT_NEAR(p.y, 99.0, 1e-12);
  const Point c = m.apply({150, 150});
  EXPECT_NEAR(c.x, 157, 1e-12);
  EXPECT_NEAR(c.y, 147, 1e-12);
}

TEST(AffineMapTest, SingularInverseThrows) {
  EXPECT_FALSE(AffineMap::scaling(0, 1).invertible());
  EXPECT_THROW(AffineMap::scaling(0, 1).inverse(), InvalidArgument);
}

}  // namespace
}  // namespace weldqa
