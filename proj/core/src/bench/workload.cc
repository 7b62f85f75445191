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

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "hardalloc/allocator.h"

namespace hardalloc::bench {
namespace {

using Rng = std::mt19937_64;

std::size_t Uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

void Pairs(Allocator& a, const WorkloadSpec& spec, std::size_t) {
  for (std::size_t i = 0; i < spec.ops; ++i) {
    void* p = a.Malloc(spec.size);
    // Keep the store from being optimized into nothing.
    if (p != nullptr) static_cast<volatile unsigned char*>(p)[0] = 1;
    a.Free(p);
  }
}

void Churn(Allocator& a, const WorkloadSpec& spec, std::size_t t) {
  Rng rng(spec.seed + t);
  std::vector<void*> window(1024, nullptr);
  for (std::size_t i = 0; i < spec.ops; ++i) {
    void*& slot = window[Uniform(rng, 0, window.size() - 1)];
    a.Free(slot);
    slot = a.Malloc(Uniform(rng, 1, 1024));
  }
  for (void* p : window) a.Free(p);
}

void MstressLike(Allocator& a, const WorkloadSpec& spec, std::size_t t) {
  Rng rng(spec.seed + t);
  std::vector<void*> survivors;
  std::size_t done = 0;
  while (done < spec.ops) {
    std::vector<void*> burst;
    const std::size_t n = std::min<std::size_t>(2000, spec.ops - done);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t size = Uniform(rng, 0, 9) == 0 ? Uniform(rng, 1, 4000)
                                                       : Uniform(rng, 8, 256);
      burst.push_back(a.Malloc(size));
    }
    std::shuffle(burst.begin(), burst.end(), rng);
    // About 5% of each burst outlives it.
    const std::size_t keep = n / 20;
    survivors.insert(survivors.end(), burst.begin(), burst.begin() + keep);
    for (std::size_t i = keep; i < burst.size(); ++i) a.Free(burst[i]);
    if (survivors.size() > 4000) {
      for (void* p : survivors) a.Free(p);
      survivors.clear();
    }
    done += n;
  }
  for (void* p : survivors) a.Free(p);
}

void LargeStress(Allocator& a, const WorkloadSpec& spec, std::size_t t) {
  Rng rng(spec.seed + t);
  std::vector<void*> window(32, nullptr);
  const std::byte one{1};
  for (std::size_t i = 0; i < spec.ops; ++i) {
    void*& slot = window[Uniform(rng, 0, window.size() - 1)];
    a.Free(slot);
    const std::size_t size = Uniform(rng, 2 * kPageSize, 64 * kPageSize);
    slot = a.Malloc(size);
    if (slot == nullptr) continue;
    auto* base = static_cast<std::byte*>(slot);
    for (std::size_t off = 0; off < size; off += kPageSize)
      a.provider().CheckedWrite(base + off, {&one, 1});
  }
  for (void* p : window) a.Free(p);
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::vector<std::string_view> Split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

template <typename T>
bool Parse(std::string_view s, T& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

}  // namespace

std::optional<BenchRow> RunWorkload(const WorkloadSpec& spec, const AllocConfig& cfg,
                                    std::string* error) {
  std::string unused;
  std::string& err = error != nullptr ? *error : unused;
  if (spec.threads == 0) {
    err = "threads must be positive";
    return std::nullopt;
  }
  auto alloc = Allocator::Create(cfg, spec.backend, &err);
  if (!alloc) return std::nullopt;
  Allocator& a = *alloc;

  std::function<void(std::size_t)> body;
  std::vector<std::atomic<void*>> table(spec.workload == "larson_like" ? 4096 : 0);
  if (spec.workload == "pairs") {
    body = [&](std::size_t t) { Pairs(a, spec, t); };
  } else if (spec.workload == "churn") {
    body = [&](std::size_t t) { Churn(a, spec, t); };
  } else if (spec.workload == "larson_like") {
    body = [&](std::size_t t) {
      Rng rng(spec.seed + t);
      for (std::size_t i = 0; i < spec.ops; ++i) {
        void* fresh = a.Malloc(Uniform(rng, 16, 512));
        a.Free(table[Uniform(rng, 0, table.size() - 1)].exchange(fresh));
      }
    };
  } else if (spec.workload == "mstress_like") {
    body = [&](std::size_t t) { MstressLike(a, spec, t); };
  } else if (spec.workload == "large_stress") {
    body = [&](std::size_t t) { LargeStress(a, spec, t); };
  } else {
    err = "unknown workload '" + spec.workload + "'";
    return std::nullopt;
  }

  a.provider().ResetPeak();
  const auto start = std::chrono::steady_clock::now();
  if (spec.threads == 1) {
    body(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < spec.threads; ++t) threads.emplace_back(body, t);
    for (std::thread& th : threads) th.join();
  }
  for (auto& slot : table) a.Free(slot.exchange(nullptr));
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  BenchRow row;
  row.workload = spec.workload;
  row.threads = spec.threads;
  row.ops = spec.ops * spec.threads;
  row.seconds = seconds;
  row.ops_per_sec = seconds > 0 ? static_cast<double>(row.ops) / seconds : 0;
  row.peak_pages = a.provider().peak_footprint_pages();
  row.final_pages = a.provider().footprint_pages();
  row.final_live = a.Stats().live();
  return row;
}

std::string FormatCsv(const std::vector<BenchRow>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const BenchRow& r : rows) {
    out += r.workload + ',' + std::to_string(r.threads) + ',' + std::to_string(r.ops) +
           ',' + FormatDouble(r.seconds) + ',' + FormatDouble(r.ops_per_sec) + ',' +
           std::to_string(r.peak_pages) + ',' + std::to_string(r.final_pages) + '\n';
  }
  return out;
}

bool EmitCsv(const std::vector<BenchRow>& rows, const std::string& path,
             std::string* error) {
  bool append = false;
  {
    std::ifstream in(path);
    std::string first;
    append = in && std::getline(in, first) && first == kCsvHeader;
  }
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) {
    if (error != nullptr) *error = "cannot open " + path;
    return false;
  }
  std::string text = FormatCsv(rows);
  if (append) text.erase(0, kCsvHeader.size() + 1);
  out << text;
  return static_cast<bool>(out);
}

std::optional<std::vector<BenchRow>> ParseCsv(std::string_view text, std::string* error) {
  std::string unused;
  std::string& err = error != nullptr ? *error : unused;
  std::vector<BenchRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != kCsvHeader) {
        err = "line 1: unexpected header";
        return std::nullopt;
      }
      continue;
    }
    const auto f = Split(line, ',');
    BenchRow r;
    if (f.size() != 7 || f[0].empty() || !Parse(f[1], r.threads) || !Parse(f[2], r.ops) ||
        !Parse(f[3], r.seconds) || !Parse(f[4], r.ops_per_sec) ||
        !Parse(f[5], r.peak_pages) || !Parse(f[6], r.final_pages)) {
      err = "line " + std::to_string(line_no) + ": malformed row";
      return std::nullopt;
    }
    r.workload = std::string(f[0]);
    rows.push_back(std::move(r));
  }
  if (line_no == 0) {
    err = "empty input";
    return std::nullopt;
  }
  return rows;
}

}  // namespace hardalloc::bench
