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

#include "hardalloc/large.h"

#include <vector>

#include "gtest/gtest.h"
#include "hardalloc/config.h"

namespace hardalloc {
namespace {

class LargeTest : public ::testing::Test {
 protected:
  PageProvider provider_{Backend::kSim};
  std::vector<AvlNode> pool_ = std::vector<AvlNode>(4);
  LargeAllocator large_{provider_, pool_};
};

TEST_F(LargeTest, RoundsUpToPages) {
  void* p = large_.Malloc(4097);
  ASSERT_NE(p, nullptr);
  EXPECT_EQ(reinterpret_cast<std::uintptr_t>(p) % kPageSize, 0u);
  EXPECT_EQ(large_.SizeOf(p), 2 * kPageSize);
  Region* r = provider_.Find(p);
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->kind(), RegionKind::kLarge);
  EXPECT_EQ(r->length_pages(), 2u);
  EXPECT_EQ(large_.count(), 1u);
  EXPECT_TRUE(large_.Validate().empty());
}

TEST_F(LargeTest, FreeUnmaps) {
  void* p = large_.Malloc(3 * kPageSize);
  EXPECT_TRUE(large_.Free(p));
  EXPECT_EQ(provider_.Find(p), nullptr);
  EXPECT_FALSE(large_.Free(p));
  EXPECT_FALSE(large_.SizeOf(p));
  EXPECT_EQ(large_.count(), 0u);
}

TEST_F(LargeTest, InteriorPointerIsNotABlock) {
  void* p = large_.Malloc(2 * kPageSize);
  EXPECT_FALSE(large_.Free(static_cast<char*>(p) + kPageSize));
  EXPECT_FALSE(large_.SizeOf(static_cast<char*>(p) + 16));
  EXPECT_EQ(large_.count(), 1u);
}

TEST_F(LargeTest, PoolExhaustionReturnsNullAndUnmaps) {
  for (int i = 0; i < 4; ++i) ASSERT_NE(large_.Malloc(kPageSize + 1), nullptr);
  const std::size_t regions = provider_.region_count();
  EXPECT_EQ(large_.Malloc(kPageSize + 1), nullptr);
  EXPECT_EQ(provider_.region_count(), regions);
  EXPECT_TRUE(large_.Validate().empty());
}

TEST_F(LargeTest, ValidateDetectsStaleEntry) {
  void* p = large_.Malloc(2 * kPageSize);
  provider_.Unreserve(p);  // behind the allocator's back
  EXPECT_FALSE(large_.Validate().empty());
}

TEST_F(LargeTest, BlocksInKeyOrder) {
  std::vector<void*> v;
  for (int i = 0; i < 3; ++i) v.push_back(large_.Malloc((i + 2) * kPageSize));
  const auto blocks = large_.Blocks();
  ASSERT_EQ(blocks.size(), 3u);
  for (std::size_t i = 1; i < blocks.size(); ++i) EXPECT_LT(blocks[i - 1].first, blocks[i].first);
}

}  // namespace
}  // namespace hardalloc
