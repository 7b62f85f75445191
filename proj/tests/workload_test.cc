// Copyright 2026 The HardAlloc Authors
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

#include "hardalloc/bench/workload.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"

namespace hardalloc::bench {
namespace {

TEST(WorkloadTest, EveryWorkloadRunsClean) {
  for (std::string_view name : kWorkloads) {
    WorkloadSpec spec;
    spec.workload = std::string(name);
    spec.ops = name == "large_stress" ? 200 : 20000;
    spec.threads = 2;
    std::string error;
    const auto row = RunWorkload(spec, DefaultConfig(), &error);
    ASSERT_TRUE(row) << error;
    EXPECT_EQ(row->ops, 2 * spec.ops);
    EXPECT_EQ(row->final_live, 0u) << name;
    EXPECT_GE(row->peak_pages, row->final_pages);
    EXPECT_GT(row->seconds, 0);
  }
}

TEST(WorkloadTest, UnknownWorkload) {
  WorkloadSpec spec;
  spec.workload = "nope";
  std::string error;
  EXPECT_FALSE(RunWorkload(spec, DefaultConfig(), &error));
  EXPECT_NE(error.find("nope"), std::string::npos);
}

TEST(WorkloadTest, PairsFootprintStaysSmall) {
  WorkloadSpec spec;
  spec.ops = 100000;
  const AllocConfig cfg = DefaultConfig();
  const auto row = RunWorkload(spec, cfg);
  ASSERT_TRUE(row);
  EXPECT_LE(row->final_pages, cfg.quarantine_capacity + 1);
}

TEST(CsvTest, RoundTrip) {
  std::vector<BenchRow> rows = {
      {"pairs", 1, 1000, 0.5, 2000, 3, 1, 0},
      {"churn", 4, 400, 0.25, 1600, 40, 12, 0},
  };
  const std::string text = FormatCsv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')), kCsvHeader);
  std::string error;
  const auto parsed = ParseCsv(text, &error);
  ASSERT_TRUE(parsed) << error;
  EXPECT_EQ(*parsed, rows);
}

TEST(CsvTest, Malformed) {
  std::string error;
  EXPECT_FALSE(ParseCsv("", &error));
  EXPECT_FALSE(ParseCsv("workload,threads\n", &error));
  EXPECT_FALSE(ParseCsv(std::string(kCsvHeader) + "\npairs,1,2,3\n", &error));
  EXPECT_EQ(error, "line 2: malformed row");
  EXPECT_FALSE(ParseCsv(std::string(kCsvHeader) + "\npairs,x,2,3,4,5,6\n", &error));
}

TEST(CsvTest, EmitAppends) {
  const std::string path = ::testing::TempDir() + "hardalloc_emit.csv";
  std::remove(path.c_str());
  const BenchRow row{"pairs", 1, 10, 0.1, 100, 1, 0, 0};
  ASSERT_TRUE(EmitCsv({row}, path));
  ASSERT_TRUE(EmitCsv({row, row}, path));
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto parsed = ParseCsv(ss.str());
  ASSERT_TRUE(parsed);
  EXPECT_EQ(parsed->size(), 3u);
  std::remove(path.c_str());
}

}  // namespace
}  // namespace hardalloc::bench
