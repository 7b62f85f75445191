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

#include "hardalloc/provider.h"

#include <array>
#include <cstring>

#include "gtest/gtest.h"
#include "hardalloc/config.h"

namespace hardalloc {
namespace {

class ProviderTest : public ::testing::TestWithParam<Backend> {
 protected:
  PageProvider provider_{GetParam()};
};

TEST_P(ProviderTest, ReserveIsZeroedAndNotResident) {
  Region* r = provider_.Reserve(3 * kPageSize);
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(reinterpret_cast<std::uintptr_t>(r->base()) % kPageSize, 0u);
  EXPECT_EQ(r->length_pages(), 3u);
  EXPECT_EQ(r->resident_count(), 0u);
  std::array<std::byte, 16> buf;
  buf.fill(std::byte{0xFF});
  EXPECT_FALSE(r->CheckedRead(kPageSize - 8, buf));
  for (std::byte b : buf) EXPECT_EQ(b, std::byte{0});
  EXPECT_EQ(provider_.footprint_pages(), 0u);
}

TEST_P(ProviderTest, ReserveRejectsPartialPages) {
  EXPECT_EQ(provider_.Reserve(100), nullptr);
  EXPECT_EQ(provider_.Reserve(0), nullptr);
  EXPECT_EQ(provider_.region_count(), 0u);
}

TEST_P(ProviderTest, WritesMakePagesResident) {
  Region* r = provider_.Reserve(4 * kPageSize);
  const std::array<std::byte, 2> two{std::byte{1}, std::byte{2}};
  EXPECT_FALSE(r->CheckedWrite(2 * kPageSize - 1, two));
  EXPECT_EQ(r->resident_count(), 2u);
  EXPECT_TRUE(r->resident(1));
  EXPECT_TRUE(r->resident(2));
  EXPECT_EQ(provider_.footprint_pages(), 2u);
  EXPECT_EQ(provider_.peak_footprint_pages(), 2u);
}

TEST_P(ProviderTest, ReleaseZeroesAndDropsResidency) {
  Region* r = provider_.Reserve(2 * kPageSize);
  std::memset(r->base(), 0xAB, 2 * kPageSize);
  r->Touch(0, 2 * kPageSize);
  EXPECT_EQ(r->resident_count(), 2u);
  EXPECT_FALSE(r->ReleasePages(1, 1));
  EXPECT_EQ(r->resident_count(), 1u);
  EXPECT_EQ(provider_.footprint_pages(), 1u);
  EXPECT_EQ(provider_.peak_footprint_pages(), 2u);
  EXPECT_EQ(static_cast<unsigned char>(r->base()[kPageSize]), 0u);
  EXPECT_EQ(static_cast<unsigned char>(r->base()[kPageSize - 1]), 0xABu);
  provider_.ResetPeak();
  EXPECT_EQ(provider_.peak_footprint_pages(), 1u);
}

TEST_P(ProviderTest, GuardPageFaults) {
  Region* r = provider_.Reserve(3 * kPageSize);
  ASSERT_FALSE(r->Protect(1, 1, PagePerm::kNone));
  std::array<std::byte, 8> buf{};
  const auto read = r->CheckedRead(kPageSize - 4, buf);
  ASSERT_TRUE(read);
  EXPECT_EQ(*read, (Fault{r->id(), 1, FaultKind::kProtNone}));
  const auto write = provider_.CheckedWrite(r->base() + 2 * kPageSize - 1, buf);
  ASSERT_TRUE(write);
  EXPECT_EQ(write->kind, FaultKind::kProtNone);
  EXPECT_EQ(r->resident_count(), 0u);
  EXPECT_TRUE(r->ReleasePages(1, 1));
  EXPECT_FALSE(r->CheckedRead(0, buf));
  EXPECT_FALSE(r->Protect(1, 1, PagePerm::kReadWrite));
  EXPECT_FALSE(r->CheckedRead(kPageSize - 4, buf));
}

TEST_P(ProviderTest, OutOfRange) {
  Region* r = provider_.Reserve(kPageSize);
  std::array<std::byte, 8> buf{};
  const auto past = r->CheckedRead(kPageSize - 4, buf);
  ASSERT_TRUE(past);
  EXPECT_EQ(past->kind, FaultKind::kOutOfRange);
  int local = 0;
  const auto stray = provider_.CheckedRead(&local, buf);
  ASSERT_TRUE(stray);
  EXPECT_EQ(*stray, (Fault{0, 0, FaultKind::kOutOfRange}));
  EXPECT_FALSE(r->CheckedRead(kPageSize, {}));
}

TEST_P(ProviderTest, FindAndUnreserve) {
  Region* a = provider_.Reserve(2 * kPageSize, RegionKind::kLarge);
  Region* b = provider_.Reserve(kPageSize, RegionKind::kMetadata);
  EXPECT_EQ(provider_.Find(a->base() + kPageSize + 5), a);
  EXPECT_EQ(provider_.Find(b->base()), b);
  EXPECT_EQ(provider_.Find(a->base() + 2 * kPageSize), a->base() + 2 * kPageSize == b->base() ? b : nullptr);
  a->Touch(0, 2 * kPageSize);
  b->Touch(0, kPageSize);
  // Metadata is not part of the client footprint.
  EXPECT_EQ(provider_.footprint_pages(), 2u);
  EXPECT_TRUE(provider_.Unreserve(a->base()));
  EXPECT_EQ(provider_.footprint_pages(), 0u);
  EXPECT_EQ(provider_.region_count(), 1u);
  EXPECT_FALSE(provider_.Unreserve(b->base() + 16));
}

INSTANTIATE_TEST_SUITE_P(Backends, ProviderTest,
                         ::testing::Values(Backend::kSim, Backend::kOs),
                         [](const auto& info) { return std::string(ToString(info.param)); });

TEST(BackendTest, Names) {
  EXPECT_EQ(ParseBackend("sim"), Backend::kSim);
  EXPECT_EQ(ParseBackend("os"), Backend::kOs);
  EXPECT_FALSE(ParseBackend("mmap"));
}

}  // namespace
}  // namespace hardalloc
