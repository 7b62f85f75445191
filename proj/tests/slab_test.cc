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

#include "hardalloc/slab.h"

#include <cstring>

#include "gtest/gtest.h"
#include "hardalloc/config.h"
#include "hardalloc/provider.h"

namespace hardalloc {
namespace {

TEST(SlabTest, SlotCounts) {
  EXPECT_EQ(SlotCount(16), 256u);
  EXPECT_EQ(SlotCount(32), 128u);
  EXPECT_EQ(SlotCount(48), 85u);
  EXPECT_EQ(SlotCount(4096), 1u);
}

TEST(SlabTest, LocateExamples) {
  EXPECT_EQ(Locate(0, 32, 2 * 4096 + 96), (SlotPosition{2, 3}));
  EXPECT_FALSE(Locate(0, 32, 2 * 4096 + 97));
  // 48-byte slots: 85 fit, the 16-byte tail of each page is not a slot.
  EXPECT_EQ(Locate(0, 48, 84 * 48), (SlotPosition{0, 84}));
  EXPECT_FALSE(Locate(0, 48, 85 * 48));
  EXPECT_EQ(Locate(8192, 64, 8192 + 4096 + 128), (SlotPosition{1, 2}));
  EXPECT_FALSE(Locate(8192, 64, 4096));
}

TEST(SlabTest, LocateRoundTrip) {
  const AllocConfig cfg = DefaultConfig();
  for (std::size_t s : cfg.sc_sizes) {
    for (std::size_t slab = 0; slab < 3; ++slab) {
      for (std::size_t slot = 0; slot < SlotCount(s); ++slot) {
        SlotRef ref{nullptr, 3 * kPageSize, slab, slot, s};
        ASSERT_EQ(Locate(3 * kPageSize, s, SlotOffset(ref)), (SlotPosition{slab, slot}))
            << s;
      }
    }
  }
}

class SlotMemoryTest : public ::testing::Test {
 protected:
  void SetUp() override {
    region_ = provider_.Reserve(4 * kPageSize);
    ASSERT_NE(region_, nullptr);
  }

  PageProvider provider_{Backend::kSim};
  Region* region_ = nullptr;
};

TEST_F(SlotMemoryTest, ZeroSlotLeavesNeighbours) {
  const SlotRef a{region_, 0, 1, 0, 48};
  const SlotRef b{region_, 0, 1, 1, 48};
  const SlotRef c{region_, 0, 1, 2, 48};
  std::memset(region_->base() + kPageSize, 0xEE, 3 * 48);
  ASSERT_FALSE(ZeroSlot(b));
  EXPECT_TRUE(IsSlotZero(b));
  EXPECT_EQ(static_cast<unsigned char>(a.data()[47]), 0xEE);
  EXPECT_EQ(static_cast<unsigned char>(c.data()[0]), 0xEE);
  EXPECT_TRUE(region_->resident(1));
}

TEST_F(SlotMemoryTest, ZeroSlotFaultsOnGuard) {
  region_->Protect(2, 1, PagePerm::kNone);
  const auto fault = ZeroSlot({region_, 0, 2, 0, 64});
  ASSERT_TRUE(fault);
  EXPECT_EQ(fault->kind, FaultKind::kProtNone);
  EXPECT_EQ(fault->page, 2u);
}

TEST_F(SlotMemoryTest, ZeroPrefix) {
  const SlotRef s{region_, 0, 0, 3, 64};
  s.data()[60] = std::byte{1};
  EXPECT_TRUE(IsSlotZero(s, 56));
  EXPECT_FALSE(IsSlotZero(s, 61));
  EXPECT_FALSE(IsSlotZero(s));
}

TEST_F(SlotMemoryTest, Canary) {
  const CanarySpec canary{0x1122334455667788ULL, 8};
  const SlotRef s{region_, 0, 0, 1, 32};
  WriteCanary(s, canary);
  EXPECT_TRUE(CheckCanary(s, canary));
  // Little-endian: the first canary byte is the low byte of the magic.
  EXPECT_EQ(static_cast<unsigned char>(s.data()[24]), 0x88);
  EXPECT_EQ(static_cast<unsigned char>(s.data()[31]), 0x11);
  EXPECT_TRUE(IsSlotZero(s, 24));
  s.data()[31] = std::byte{0};
  EXPECT_FALSE(CheckCanary(s, canary));

  const CanarySpec short_canary{0xAABBCCDD, 2};
  const SlotRef t{region_, 0, 0, 4, 32};
  WriteCanary(t, short_canary);
  EXPECT_EQ(static_cast<unsigned char>(t.data()[30]), 0xDD);
  EXPECT_EQ(static_cast<unsigned char>(t.data()[31]), 0xCC);
  EXPECT_TRUE(IsSlotZero(t, 30));
}

}  // namespace
}  // namespace hardalloc
