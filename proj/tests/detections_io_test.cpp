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
#include "weldqa/detections_io.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "test_util.hpp"

namespace weldqa {
namespace {

std::vector<Detection> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_detections(in, "dets.jsonl");
}

TEST(DetectionsIoTest, EmptyFile) {
  EXPECT_TRUE(parse("").empty());
  EXPECT_TRUE(parse("\n  \n").empty());
}

TEST(DetectionsIoTest, CornerConversion) {
  const auto d = parse(R"({"image_id":"img1","label":"pore","bbox":[10,10,20,20],"score":0.9})");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].image_id, "img1");
  EXPECT_EQ(d[0].label, "pore");
  EXPECT_EQ(d[0].box, (BBox{10, 10, 30, 30}));
  EXPECT_EQ(d[0].score, 0.9);
}

TEST(DetectionsIoTest, ScoreOutOfRangeNamesRecord) {
  const std::string text =
      R"({"image_id":"a","label":"pore","bbox":[0,0,5,5],"score":0.5})"
      "\n"
      R"({"image_id":"a","label":"pore","bbox":[0,0,5,5],"score":1.5})"
      "\n";
  try {
    parse(text);
    FAIL() << "expected an error";
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("record 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("dets.jsonl"), std::string::npos) << msg;
  }
}

TEST(DetectionsIoTest, MalformedRecords) {
  EXPECT_THROW(parse("{not json"), ParseError);
  EXPECT_THROW(parse("[1,2,3]"), ParseError);
  EXPECT_THROW(parse(R"({"image_id":"a","label":"pore","bbox":[0,0,5],"score":0.5})"), ParseError);
  EXPECT_THROW(parse(R"({"image_id":"a","label":"pore","bbox":[0,0,-5,5],"score":0.5})"), ParseError);
  EXPECT_THROW(parse(R"({"image_id":"a","bbox":[0,0,5,5],"score":0.5})"), ParseError);
  EXPECT_THROW(parse(R"({"image_id":"a","label":"pore","bbox":[0,0,5,5],"score":"high"})"), ParseError);
}

TEST(DetectionsIoTest, UnknownImagesAreKept) {
  const auto d = parse(R"({"image_id":"whatever","label":"pore","bbox":[0,0,5,5],"score":0})");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].image_id, "whatever");
}

TEST(DetectionsIoTest, WriteThenLoadRoundTrips) {
  testing::TempDir dir;
  const std::vector<Detection> dets{{"a", "pore", {1.5, 2, 11, 22.25}, 0.125},
                                    {"b", "spatter", {0, 0, 3, 4}, 1.0}};
  write_detections(dets, dir / "d.jsonl");
  EXPECT_EQ(load_detections(dir / "d.jsonl"), dets);
  EXPECT_THROW(load_detections(dir / "missing.jsonl"), IoError);
}

}  // namespace
}  // namespace weldqa
