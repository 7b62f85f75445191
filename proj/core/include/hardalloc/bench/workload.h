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

#ifndef HARDALLOC_BENCH_WORKLOAD_H_
#define HARDALLOC_BENCH_WORKLOAD_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hardalloc/config.h"
#include "hardalloc/provider.h"

namespace hardalloc::bench {

// pairs         alloc then immediately free `size` bytes, `ops` times
// churn         random sizes over a bounded live window per thread
// larson_like   threads swap blocks through a shared table, so frees are
//               frequently cross-thread
// mstress_like  allocation bursts followed by mostly-complete teardown
// large_stress  multi-page blocks, every page written once
inline constexpr std::string_view kWorkloads[] = {"pairs", "churn", "larson_like",
                                                  "mstress_like", "large_stress"};

struct WorkloadSpec {
  std::string workload = "pairs";
  std::size_t threads = 1;
  std::size_t ops = 1000000;  // per thread
  std::uint64_t seed = 1;
  std::size_t size = 64;  // pairs only
  Backend backend = Backend::kSim;
};

struct BenchRow {
  std::string workload;
  std::size_t threads = 0;
  std::size_t ops = 0;  // total across threads
  double seconds = 0;
  double ops_per_sec = 0;
  std::size_t peak_pages = 0;   // resident client pages, high-water mark
  std::size_t final_pages = 0;  // resident client pages at the end
  std::size_t final_live = 0;   // not part of the CSV

  friend bool operator==(const BenchRow&, const BenchRow&) = default;
};

inline constexpr std::string_view kCsvHeader =
    "workload,threads,ops,seconds,ops_per_sec,peak_pages,final_pages";

// Runs one workload on a fresh allocator. Returns nullopt and sets `error`
// for an unknown workload or an invalid configuration.
std::optional<BenchRow> RunWorkload(const WorkloadSpec& spec, const AllocConfig& cfg,
                                    std::string* error = nullptr);

std::string FormatCsv(const std::vector<BenchRow>& rows);
// Appends to `path` when it already starts with the header, else rewrites it.
bool EmitCsv(const std::vector<BenchRow>& rows, const std::string& path,
             std::string* error = nullptr);
std::optional<std::vector<BenchRow>> ParseCsv(std::string_view text,
                                              std::string* error = nullptr);

}  // namespace hardalloc::bench

#endif  // HARDALLOC_BENCH_WORKLOAD_H_
