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

#include <cstddef>
#include <memory>
#include <random>
#include <vector>

#include "benchmark/benchmark.h"
#include "hardalloc/allocator.h"
#include "hardalloc/avl_map.h"
#include "hardalloc/bitmap.h"
#include "hardalloc/config.h"

namespace hardalloc {
namespace {

std::unique_ptr<Allocator> MakeAllocator(bool hardened) {
  AllocConfig cfg = DefaultConfig();
  cfg.canary_enabled = hardened;
  cfg.zero_check_enabled = hardened;
  return Allocator::Create(cfg);
}

void BM_MallocFreePair(benchmark::State& state) {
  auto a = MakeAllocator(state.range(1) != 0);
  const auto size = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    void* p = a->Malloc(size);
    benchmark::DoNotOptimize(p);
    a->Free(p);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MallocFreePair)
    ->ArgNames({"size", "hardened"})
    ->ArgsProduct({{16, 64, 512, 4000}, {0, 1}});

// Frees land in partial slabs, so no slab ever empties into quarantine.
void BM_MallocFreeWarm(benchmark::State& state) {
  auto a = MakeAllocator(true);
  const auto size = static_cast<std::size_t>(state.range(0));
  std::vector<void*> pinned;
  for (int i = 0; i < 4; ++i) pinned.push_back(a->Malloc(size));
  for (auto _ : state) {
    void* p = a->Malloc(size);
    benchmark::DoNotOptimize(p);
    a->Free(p);
  }
  for (void* p : pinned) a->Free(p);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MallocFreeWarm)->Arg(16)->Arg(256)->Arg(2048);

void BM_RandomWindow(benchmark::State& state) {
  auto a = MakeAllocator(true);
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::size_t> size(1, 2048);
  std::vector<void*> window(static_cast<std::size_t>(state.range(0)), nullptr);
  std::uniform_int_distribution<std::size_t> pick(0, window.size() - 1);
  for (auto _ : state) {
    void*& slot = window[pick(rng)];
    a->Free(slot);
    slot = a->Malloc(size(rng));
  }
  for (void* p : window) a->Free(p);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RandomWindow)->Arg(64)->Arg(4096);

void BM_LargeMallocFree(benchmark::State& state) {
  auto a = MakeAllocator(true);
  const auto size = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    void* p = a->Malloc(size);
    benchmark::DoNotOptimize(p);
    a->Free(p);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LargeMallocFree)->Arg(8192)->Arg(1 << 20);

void BM_BitmapFindFirst(benchmark::State& state) {
  auto bm = *SlotBitmap::Create(256);
  for (std::size_t i = 0; i + 1 < 256; ++i) bm.SetAllocated(i);
  for (auto _ : state) benchmark::DoNotOptimize(bm.FindFirstAvailable());
}
BENCHMARK(BM_BitmapFindFirst);

void BM_AvlInsertRemove(benchmark::State& state) {
  std::vector<AvlNode> pool(1 << 16);
  AvlMap map(pool);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10000; ++i) map.Insert(rng() << 12, 4096);
  std::uint64_t key = 0;
  for (auto _ : state) {
    key = rng() << 12;
    map.Insert(key, 4096);
    benchmark::DoNotOptimize(map.Remove(key));
  }
}
BENCHMARK(BM_AvlInsertRemove);

void BM_MallocFreeThreaded(benchmark::State& state) {
  static std::unique_ptr<Allocator> shared;
  if (state.thread_index() == 0) shared = MakeAllocator(true);
  // Entering the loop is a barrier across threads, so `shared` is set first.
  for (auto _ : state) {
    void* p = shared->Malloc(64);
    benchmark::DoNotOptimize(p);
    shared->Free(p);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MallocFreeThreaded)->Threads(1)->Threads(4);

}  // namespace
}  // namespace hardalloc

BENCHMARK_MAIN();
