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
#include "weldqa/report.hpp"

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace weldqa {
namespace {

EvalResult sample_result() {
  Dataset gt;
  gt.images.push_back({"img", "img.png", 300, 300, 1});
  gt.annotations.push_back({"img", "pore", {0, 0, 10, 10}});
  gt.annotations.push_back({"img", "pore", {100, 100, 150, 150}});
  const std::vector<Detection> dets{{"img", "pore", {0, 0, 10, 6}, 0.9},
                                    {"img", "pore", {100, 100, 150, 150}, 0.8}};
  return evaluate(dets, gt);
}

TEST(ReportTest, JsonRoundTrip) {
  const EvalResult r = sample_result();
  const auto j = eval_result_to_json(r, "base", EvalConfig{});
  EXPECT_EQ(j["run"], "base");
  EXPECT_EQ(j["ap"].size(), 10u);
  EXPECT_EQ(j["ar"].size(), 3u);
  const NamedResult back = eval_result_from_json(nlohmann::json::parse(j.dump()), "x");
  EXPECT_EQ(back.run, "base");
  EXPECT_EQ(back.result.ap, r.ap);
  EXPECT_EQ(back.result.ar, r.ar);
  EXPECT_EQ(back.result.m_ap, r.m_ap);
  EXPECT_EQ(back.result.num_gt, r.num_gt);
  EXPECT_EQ(back.result.iou_thresholds, r.iou_thresholds);
}

TEST(ReportTest, NotAReport) {
  EXPECT_THROW(eval_result_from_json(nlohmann::json::parse("{}"), "x"), ParseError);
  testing::TempDir dir;
  testing::write_file(dir / "bad.json", "{nope");
  EXPECT_THROW(load_eval_report(dir / "bad.json"), ParseError);
  EXPECT_THROW(load_eval_report(dir / "missing.json"), IoError);
}

TEST(ReportTest, CsvRows) {
  const std::string csv = eval_result_to_csv(sample_result(), "base");
  EXPECT_EQ(csv.rfind("run,metric,iou,bucket,max_det,value\n", 0), 0u);
  EXPECT_NE(csv.find("base,ap,0.5,all,100,"), std::string::npos);
  EXPECT_NE(csv.find("base,ar,,small,1,"), std::string::npos);
  EXPECT_NE(csv.find("base,m_ar_100,,all,100,"), std::string::npos);
  // 40 AP rows, 12 AR rows, 4 bucket means, ap_50 and m_ar_100, header.
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 40 + 12 + 4 + 2 + 1);
}

TEST(CompareTest, SingleRunIsOneRow) {
  const Comparison c = compare_runs({{"base", sample_result()}});
  EXPECT_EQ(c.rows.size(), 1u);
  const std::string text = c.to_text();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_NE(text.find("| base |"), std::string::npos);
  EXPECT_EQ(c.series[0].size(), 10u);
}

TEST(CompareTest, IdenticalResultsGiveIdenticalRows) {
  const EvalResult r = sample_result();
  const Comparison c = compare_runs({{"a", r}, {"b", r}});
  EXPECT_EQ(c.rows[0], c.rows[1]);
  EXPECT_THROW(compare_runs({}), InvalidArgument);
}

TEST(CompareTest, CsvAndSeries) {
  const EvalResult r = sample_result();
  const Comparison c = compare_runs({{"x2", r}});
  EXPECT_EQ(c.to_csv().substr(0, c.to_csv().find('\n')),
            "run,m_ap,ap_50,m_ar_100,ap_small,ap_medium,ap_large,ar_small,ar_medium,ar_large");
  const std::string s = c.series_csv();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 11);
  EXPECT_NE(s.find("x2,0.95,"), std::string::npos);
}

TEST(CompareTest, UndefinedCellsRenderAsNa) {
  EvalResult r = sample_result();
  for (auto& row : r.ap) row[3] = kUndefinedMetric;
  EXPECT_NE(compare_runs({{"a", r}}).to_text().find("n/a"), std::string::npos);
}

}  // namespace
}  // namespace weldqa
