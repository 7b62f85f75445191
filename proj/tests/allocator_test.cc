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

#include "hardalloc/allocator.h"

#include <cstring>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gtest/gtest.h"

namespace hardalloc {
namespace {

int g_reports = 0;
void CountingHandler(std::string_view) { ++g_reports; }

class AllocatorTest : public ::testing::TestWithParam<Backend> {
 protected:
  void SetUp() override {
    g_reports = 0;
    SetReportHandler(&CountingHandler);
  }
  void TearDown() override { SetReportHandler(nullptr); }

  std::unique_ptr<Allocator> Make(AllocConfig cfg = DefaultConfig()) {
    std::string error;
    auto a = Allocator::Create(cfg, GetParam(), &error);
    EXPECT_NE(a, nullptr) << error;
    return a;
  }

  static bool AllZero(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      if (b[i] != 0) return false;
    }
    return true;
  }
};

TEST_P(AllocatorTest, CreateRejectsBadConfig) {
  AllocConfig cfg = DefaultConfig();
  cfg.nb_arenas = 0;
  std::string error;
  EXPECT_EQ(Allocator::Create(cfg, GetParam(), &error), nullptr);
  EXPECT_NE(error, "");
}

TEST_P(AllocatorTest, SmallRequests) {
  auto a = Make();
  void* z = a->Malloc(0);
  ASSERT_NE(z, nullptr);
  EXPECT_EQ(reinterpret_cast<std::uintptr_t>(z) % 16, 0u);
  EXPECT_EQ(a->UsableSize(z), 8u);
  void* p = a->Malloc(100);
  EXPECT_EQ(a->UsableSize(p), 104u);  // 112-byte slot minus the canary
  EXPECT_TRUE(AllZero(p, 100));
  EXPECT_TRUE(a->data_region().Contains(p));
  const auto loc = a->LocateRegular(p);
  ASSERT_TRUE(loc);
  EXPECT_EQ(a->config().sc_sizes[loc->class_index], 112u);
  EXPECT_EQ(a->FreeWithOutcome(p), FreeOutcome::kFreed);
  EXPECT_EQ(a->FreeWithOutcome(z), FreeOutcome::kFreed);
  EXPECT_EQ(a->FreeWithOutcome(nullptr), FreeOutcome::kNull);
  EXPECT_TRUE(a->Validate().empty());
}

TEST_P(AllocatorTest, LargeRequests) {
  auto a = Make();
  void* p = a->Malloc(4096);  // does not fit a 4096 slot with the canary
  ASSERT_NE(p, nullptr);
  EXPECT_FALSE(a->data_region().Contains(p));
  EXPECT_EQ(reinterpret_cast<std::uintptr_t>(p) % kPageSize, 0u);
  EXPECT_EQ(a->UsableSize(p), 4096u);
  void* q = a->Malloc(4097);
  EXPECT_EQ(a->UsableSize(q), 8192u);
  EXPECT_TRUE(AllZero(q, 4097));
  EXPECT_EQ(a->large().count(), 2u);
  EXPECT_EQ(a->Stats().large_live, 2u);
  EXPECT_EQ(a->FreeWithOutcome(p), FreeOutcome::kLargeFreed);
  EXPECT_EQ(a->FreeWithOutcome(p), FreeOutcome::kInvalid);
  EXPECT_EQ(a->FreeWithOutcome(q), FreeOutcome::kLargeFreed);
  EXPECT_EQ(a->large().count(), 0u);
  EXPECT_TRUE(a->Validate().empty());

  AllocConfig plain = DefaultConfig();
  plain.canary_enabled = false;
  auto b = Make(plain);
  void* r = b->Malloc(4096);
  EXPECT_TRUE(b->data_region().Contains(r));
  b->Free(r);
}

TEST_P(AllocatorTest, InvalidFrees) {
  auto a = Make();
  int local = 0;
  EXPECT_EQ(a->FreeWithOutcome(&local), FreeOutcome::kInvalid);
  void* p = a->Malloc(64);
  void* keep = a->Malloc(64);
  const std::string before = a->StatsCsv();
  EXPECT_EQ(a->FreeWithOutcome(static_cast<char*>(p) + 16), FreeOutcome::kInvalid);
  EXPECT_EQ(a->StatsCsv(), before);
  a->Free(p);
  EXPECT_EQ(a->FreeWithOutcome(p), FreeOutcome::kInvalid);
  // An address in an arena's span that no class has reached yet.
  auto* unused = a->data_region().base() + a->ClassSpanOffset(3, 27) + 7 * kPageSize;
  EXPECT_EQ(a->FreeWithOutcome(unused), FreeOutcome::kInvalid);
  EXPECT_EQ(a->Stats().invalid_frees, 4u);
  EXPECT_EQ(g_reports, 4);
  EXPECT_TRUE(a->Validate().empty());
  a->Free(keep);
}

TEST_P(AllocatorTest, IgnorePolicyIsSilent) {
  AllocConfig cfg = DefaultConfig();
  cfg.invalid_free_policy = InvalidFreePolicy::kIgnore;
  auto a = Make(cfg);
  void* p = a->Malloc(64);
  a->Free(p);
  EXPECT_EQ(a->FreeWithOutcome(p), FreeOutcome::kInvalid);
  EXPECT_EQ(g_reports, 0);
  EXPECT_EQ(a->Stats().invalid_frees, 1u);
}

TEST_P(AllocatorTest, CanaryReported) {
  auto a = Make();
  void* p = a->Malloc(24);
  static_cast<unsigned char*>(p)[24] = 0;
  EXPECT_EQ(a->FreeWithOutcome(p), FreeOutcome::kCorruptCanary);
  EXPECT_EQ(a->Stats().canary_reports, 1u);
  EXPECT_EQ(a->Stats().corruption_detected(), 1u);
  EXPECT_EQ(g_reports, 1);
}

TEST_P(AllocatorTest, Calloc) {
  auto a = Make();
  void* p = a->Calloc(10, 10);
  ASSERT_NE(p, nullptr);
  EXPECT_GE(a->UsableSize(p), 100u);
  EXPECT_TRUE(AllZero(p, 100));
  EXPECT_EQ(a->Calloc(SIZE_MAX / 2, 3), nullptr);
  void* big = a->Calloc(3, 5000);
  EXPECT_TRUE(AllZero(big, 15000));
  a->Free(p);
  a->Free(big);
}

TEST_P(AllocatorTest, Realloc) {
  auto a = Make();
  void* p = a->Realloc(nullptr, 40);
  ASSERT_NE(p, nullptr);
  std::memset(p, 0x11, 40);
  ASSERT_EQ(a->Realloc(p, 36), p);  // still the 48-byte class
  void* q = a->Realloc(p, 300);
  ASSERT_NE(q, nullptr);
  ASSERT_NE(q, p);
  EXPECT_EQ(a->UsableSize(p), 0u);
  const auto* b = static_cast<const unsigned char*>(q);
  for (int i = 0; i < 50; ++i) ASSERT_EQ(b[i], i < 40 ? 0x11 : 0) << i;
  EXPECT_TRUE(AllZero(b + 56, 300 - 56));
  void* big = a->Realloc(q, 10000);
  EXPECT_EQ(static_cast<unsigned char*>(big)[39], 0x11);
  void* small = a->Realloc(big, 16);
  EXPECT_EQ(static_cast<unsigned char*>(small)[15], 0x11);
  EXPECT_EQ(a->large().count(), 0u);
  EXPECT_EQ(a->Realloc(small, 0), nullptr);
  EXPECT_EQ(a->UsableSize(small), 0u);
  // Realloc of a dead block applies the invalid-free policy.
  EXPECT_EQ(a->Realloc(small, 32), nullptr);
  EXPECT_EQ(a->Stats().invalid_frees, 1u);
  EXPECT_EQ(a->Stats().live(), 0u);
  EXPECT_TRUE(a->Validate().empty());
}

TEST_P(AllocatorTest, AlignedAlloc) {
  auto a = Make();
  void* p = a->AlignedAlloc(64, 100);
  EXPECT_EQ(reinterpret_cast<std::uintptr_t>(p) % 64, 0u);
  void* page = a->AlignedAlloc(4096, 1);
  EXPECT_EQ(reinterpret_cast<std::uintptr_t>(page) % 4096, 0u);
  const auto loc = a->LocateRegular(page);
  ASSERT_TRUE(loc);
  EXPECT_EQ(a->size_class(loc->arena, loc->class_index).slot_count(), 1u);
  EXPECT_EQ(a->AlignedAlloc(48, 10), nullptr);
  EXPECT_EQ(a->AlignedAlloc(8192, 10), nullptr);
  EXPECT_EQ(a->AlignedAlloc(0, 10), nullptr);
  void* low = a->AlignedAlloc(8, 10);
  EXPECT_EQ(reinterpret_cast<std::uintptr_t>(low) % 16, 0u);
  // 32-aligned requests never land in the 48-byte class.
  for (int i = 0; i < 200; ++i) {
    void* x = a->AlignedAlloc(32, 33);
    ASSERT_EQ(reinterpret_cast<std::uintptr_t>(x) % 32, 0u);
  }
  void* large = a->AlignedAlloc(4096, 5000);
  EXPECT_EQ(reinterpret_cast<std::uintptr_t>(large) % 4096, 0u);
  EXPECT_TRUE(a->Validate().empty());
}

TEST_P(AllocatorTest, FallsBackToLargerClassInSameArena) {
  AllocConfig cfg = DefaultConfig();
  cfg.nb_arenas = 1;
  cfg.slabs_per_class = 2;  // one data slab per class
  auto a = Make(cfg);
  std::vector<void*> v;
  for (int i = 0; i < 256; ++i) v.push_back(a->Malloc(8));
  EXPECT_EQ(a->LocateRegular(v.back())->class_index, 0u);
  void* spill = a->Malloc(8);
  ASSERT_NE(spill, nullptr);
  EXPECT_EQ(a->LocateRegular(spill)->class_index, 1u);
  EXPECT_TRUE(a->Validate().empty());
}

TEST_P(AllocatorTest, ArenasAssignedRoundRobin) {
  auto a = Make();
  std::vector<std::size_t> seen;
  for (int i = 0; i < 4; ++i) {
    std::thread([&] {
      seen.push_back(a->ArenaOfCurrentThread());
      // Stable within a thread.
      EXPECT_EQ(a->ArenaOfCurrentThread(), seen.back());
    }).join();
  }
  EXPECT_EQ(std::set<std::size_t>(seen.begin(), seen.end()).size(), 4u);
}

TEST_P(AllocatorTest, ThreadsAllocateInTheirArena) {
  auto a = Make();
  std::vector<void*> ptrs(4);
  std::vector<std::size_t> arenas(4);
  for (int t = 0; t < 4; ++t) {
    std::thread([&, t] {
      arenas[t] = a->ArenaOfCurrentThread();
      ptrs[t] = a->Malloc(64);
    }).join();
  }
  for (int t = 0; t < 4; ++t) {
    EXPECT_EQ(a->LocateRegular(ptrs[t])->arena, arenas[t]);
    a->Free(ptrs[t]);  // cross-thread free
  }
  EXPECT_EQ(a->Stats().live(), 0u);
}

TEST_P(AllocatorTest, ClassSpansTileTheDataRegion) {
  auto a = Make();
  const auto& cfg = a->config();
  for (std::size_t ar = 0; ar < cfg.nb_arenas; ++ar) {
    for (std::size_t c = 0; c < cfg.nb_classes(); ++c) {
      const std::size_t off = a->ClassSpanOffset(ar, c);
      EXPECT_EQ(off, (ar * cfg.nb_classes() + c) * cfg.slabs_per_class * kPageSize);
      const auto loc = a->LocateRegular(a->data_region().base() + off);
      ASSERT_TRUE(loc);
      EXPECT_EQ(loc->arena, ar);
      EXPECT_EQ(loc->class_index, c);
      EXPECT_EQ(a->size_class(ar, c).class_base(), off);
    }
  }
  EXPECT_FALSE(a->metadata_region().Contains(a->data_region().base()));
}

TEST_P(AllocatorTest, StatsCsv) {
  auto a = Make();
  void* p = a->Malloc(20);
  std::istringstream in(a->StatsCsv());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "arena,class,slot_size,live,slabs_used,quarantined,corruption_detected");
  int rows = 0;
  bool saw_live = false;
  while (std::getline(in, line)) {
    ++rows;
    saw_live |= line.rfind("0,1,32,1,", 0) == 0;
  }
  EXPECT_EQ(rows, 4 * 28);
  EXPECT_TRUE(saw_live);
  a->Free(p);
}

INSTANTIATE_TEST_SUITE_P(Backends, AllocatorTest,
                         ::testing::Values(Backend::kSim, Backend::kOs),
                         [](const auto& info) { return std::string(ToString(info.param)); });

TEST(AllocatorDeathTest, AbortPolicy) {
  AllocConfig cfg = DefaultConfig();
  cfg.invalid_free_policy = InvalidFreePolicy::kAbort;
  auto a = Allocator::Create(cfg);
  void* p = a->Malloc(16);
  a->Free(p);
  EXPECT_DEATH(a->Free(p), "invalid free");
}

TEST(FreeOutcomeTest, Names) {
  EXPECT_EQ(ToString(FreeOutcome::kCorruptCanary), "corrupt-canary");
  EXPECT_EQ(ToString(FreeOutcome::kInvalid), "invalid");
}

}  // namespace
}  // namespace hardalloc
