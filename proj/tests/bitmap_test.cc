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

#include "hardalloc/bitmap.h"

#include "gtest/gtest.h"
#include "oracles.h"

namespace hardalloc {
namespace {

TEST(BitmapTest, CreateBounds) {
  EXPECT_TRUE(SlotBitmap::Create(1));
  EXPECT_TRUE(SlotBitmap::Create(256));
  EXPECT_FALSE(SlotBitmap::Create(257));
}

TEST(BitmapTest, FreshIsEmpty) {
  auto bm = *SlotBitmap::Create(128);
  EXPECT_TRUE(bm.IsEmpty());
  EXPECT_FALSE(bm.IsFull());
  EXPECT_EQ(bm.CountAvailable(), 128u);
  EXPECT_EQ(bm.FindFirstAvailable(), 0u);
  EXPECT_TRUE(bm.TailClear());
  EXPECT_FALSE(bm.IsAvailable(128));
}

TEST(BitmapTest, FirstAvailableCrossesWords) {
  auto bm = *SlotBitmap::Create(200);
  for (std::size_t i = 0; i < 130; ++i) ASSERT_TRUE(bm.SetAllocated(i));
  EXPECT_EQ(bm.FindFirstAvailable(), 130u);
  for (std::size_t i = 130; i < 200; ++i) ASSERT_TRUE(bm.SetAllocated(i));
  EXPECT_TRUE(bm.IsFull());
  EXPECT_FALSE(bm.FindFirstAvailable());
  EXPECT_TRUE(bm.SetAvailable(77));
  EXPECT_EQ(bm.FindFirstAvailable(), 77u);
}

TEST(BitmapTest, DoubleTransitionsRejected) {
  auto bm = *SlotBitmap::Create(85);
  ASSERT_TRUE(bm.SetAllocated(3));
  const SlotBitmap before = bm;
  EXPECT_FALSE(bm.SetAllocated(3));
  EXPECT_EQ(bm, before);
  EXPECT_FALSE(bm.SetAvailable(4));
  EXPECT_EQ(bm, before);
  EXPECT_FALSE(bm.SetAllocated(85));
  EXPECT_FALSE(bm.SetAvailable(85));
  EXPECT_EQ(bm, before);
}

TEST(BitmapTest, TailCorruptionDetected) {
  auto bm = *SlotBitmap::Create(85);
  bm.words_for_testing()[1] |= std::uint64_t{1} << 30;  // slot 94
  EXPECT_FALSE(bm.TailClear());
}

TEST(BitmapTest, ExhaustiveAgainstBoolArray) {
  const auto r = testing::CheckBitmapExhaustive(16);
  EXPECT_GT(r.checks, 1000000u);
  for (const auto& m : r.mismatches) ADD_FAILURE() << m;
}

}  // namespace
}  // namespace hardalloc
