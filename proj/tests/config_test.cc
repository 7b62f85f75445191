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

#include "hardalloc/config.h"

#include <map>
#include <string>
#include <vector>

#include "gtest/gtest.h"

namespace hardalloc {
namespace {

std::vector<std::size_t> ReferenceLadder() {
  std::vector<std::size_t> out;
  for (std::size_t s = 16; s <= 128; s += 16) out.push_back(s);
  for (std::size_t base = 128; base < 4096; base *= 2) {
    for (std::size_t k = 1; k <= 4; ++k) out.push_back(base + k * base / 4);
  }
  return out;
}

TEST(ConfigTest, DefaultLadder) {
  const AllocConfig cfg = DefaultConfig();
  EXPECT_EQ(cfg.sc_sizes, ReferenceLadder());
  EXPECT_EQ(cfg.nb_classes(), 28u);
  for (std::size_t s : cfg.sc_sizes) {
    EXPECT_EQ(s % 16, 0u) << s;
    EXPECT_LE(s, kPageSize);
  }
  EXPECT_EQ(cfg.sc_sizes.back(), kPageSize);
}

TEST(ConfigTest, Defaults) {
  const AllocConfig cfg = DefaultConfig();
  EXPECT_EQ(cfg.nb_arenas, 4u);
  EXPECT_EQ(cfg.guard_interval, 2u);
  EXPECT_EQ(cfg.quarantine_capacity, 32u);
  EXPECT_EQ(cfg.slabs_per_class, 1024u);
  EXPECT_TRUE(cfg.canary_enabled);
  EXPECT_TRUE(cfg.zero_check_enabled);
  EXPECT_EQ(cfg.invalid_free_policy, InvalidFreePolicy::kReport);
  EXPECT_EQ(cfg.Validate(), "");
}

TEST(ConfigTest, ValidateRejects) {
  AllocConfig cfg = DefaultConfig();
  cfg.nb_arenas = 0;
  EXPECT_NE(cfg.Validate(), "");
  cfg = DefaultConfig();
  cfg.sc_sizes = {16, 40};
  EXPECT_NE(cfg.Validate(), "");
  cfg.sc_sizes = {32, 16};
  EXPECT_NE(cfg.Validate(), "");
  cfg.sc_sizes = {16, 8192};
  EXPECT_NE(cfg.Validate(), "");
  cfg = DefaultConfig();
  cfg.slabs_per_class = 0;
  EXPECT_NE(cfg.Validate(), "");
}

TEST(ConfigTest, ClassIndexExamples) {
  AllocConfig plain = DefaultConfig();
  plain.canary_enabled = false;
  const AllocConfig hardened = DefaultConfig();

  auto size_of = [](const AllocConfig& cfg, std::size_t req, std::size_t align) {
    const auto idx = ClassIndexFor(req, align, cfg);
    return idx ? cfg.sc_sizes[*idx] : 0;
  };
  EXPECT_EQ(size_of(plain, 17, 16), 32u);
  EXPECT_EQ(size_of(hardened, 100, 64), 128u);
  EXPECT_EQ(size_of(plain, 0, 16), 16u);
  EXPECT_EQ(size_of(hardened, 0, 16), 16u);
  EXPECT_EQ(size_of(hardened, 8, 16), 16u);
  EXPECT_EQ(size_of(hardened, 9, 16), 32u);
  EXPECT_EQ(size_of(plain, 4096, 16), 4096u);
  EXPECT_FALSE(ClassIndexFor(4097, 16, plain));
  EXPECT_FALSE(ClassIndexFor(4097, 16, hardened));
  EXPECT_EQ(size_of(hardened, 4088, 16), 4096u);
  EXPECT_FALSE(ClassIndexFor(4089, 16, hardened));
  // 48-byte slots are not 32-aligned at odd slot indices.
  EXPECT_EQ(size_of(plain, 40, 32), 64u);
  EXPECT_EQ(size_of(plain, 1000, 4096), 4096u);
}

// Smallest class that fits the request plus canary and, for alignments above
// 16, is a power-of-two multiple of the alignment.
TEST(ConfigTest, ClassIndexMatchesLinearScan) {
  for (bool canary : {false, true}) {
    AllocConfig cfg = DefaultConfig();
    cfg.canary_enabled = canary;
    for (std::size_t align = 16; align <= kPageSize; align *= 2) {
      for (std::size_t req = 0; req <= kPageSize + 1; ++req) {
        std::optional<std::size_t> want;
        for (std::size_t i = 0; i < cfg.nb_classes(); ++i) {
          const std::size_t s = cfg.sc_sizes[i];
          bool aligned = align <= 16;
          for (std::size_t m = align; m <= kPageSize && !aligned; m *= 2) aligned = s == m;
          if (s >= req + cfg.canary_budget() && aligned) {
            want = i;
            break;
          }
        }
        ASSERT_EQ(ClassIndexFor(req, align, cfg), want)
            << "req=" << req << " align=" << align << " canary=" << canary;
      }
    }
  }
}

TEST(ConfigTest, UsableSize) {
  AllocConfig cfg = DefaultConfig();
  EXPECT_EQ(UsableSizeOfClass(1, cfg), 24u);
  EXPECT_EQ(UsableSizeOfClass(0, cfg), 8u);
  cfg.canary_enabled = false;
  EXPECT_EQ(UsableSizeOfClass(1, cfg), 32u);
}

TEST(ConfigTest, EnvironmentOverrides) {
  std::map<std::string, std::string> env = {
      {"HARDALLOC_ARENAS", "2"},          {"HARDALLOC_GUARD_INTERVAL", "0"},
      {"HARDALLOC_QUARANTINE", "5"},      {"HARDALLOC_NO_CANARY", "1"},
      {"HARDALLOC_NO_ZERO_CHECK", "yes"}, {"HARDALLOC_INVALID_FREE", "abort"},
  };
  auto lookup = [&](const char* name) -> const char* {
    const auto it = env.find(name);
    return it == env.end() ? nullptr : it->second.c_str();
  };
  AllocConfig cfg = DefaultConfig();
  EXPECT_EQ(ApplyEnvironmentOverrides(cfg, lookup), "");
  EXPECT_EQ(cfg.nb_arenas, 2u);
  EXPECT_EQ(cfg.guard_interval, 0u);
  EXPECT_EQ(cfg.quarantine_capacity, 5u);
  EXPECT_FALSE(cfg.canary_enabled);
  EXPECT_FALSE(cfg.zero_check_enabled);
  EXPECT_EQ(cfg.invalid_free_policy, InvalidFreePolicy::kAbort);

  env = {{"HARDALLOC_NO_CANARY", "0"}};
  cfg = DefaultConfig();
  EXPECT_EQ(ApplyEnvironmentOverrides(cfg, lookup), "");
  EXPECT_TRUE(cfg.canary_enabled);
}

TEST(ConfigTest, EnvironmentOverrideErrors) {
  for (const auto& [name, value] : std::map<std::string, std::string>{
           {"HARDALLOC_ARENAS", "four"},
           {"HARDALLOC_QUARANTINE", "-1"},
           {"HARDALLOC_INVALID_FREE", "explode"},
           {"HARDALLOC_ARENAS", "0"}}) {
    AllocConfig cfg = DefaultConfig();
    const std::string err = ApplyEnvironmentOverrides(
        cfg, [&](const char* n) { return n == name ? value.c_str() : nullptr; });
    EXPECT_NE(err, "") << name << "=" << value;
  }
}

TEST(ConfigTest, PolicyNames) {
  for (auto p : {InvalidFreePolicy::kIgnore, InvalidFreePolicy::kReport,
                 InvalidFreePolicy::kAbort}) {
    EXPECT_EQ(ParseInvalidFreePolicy(ToString(p)), p);
  }
  EXPECT_FALSE(ParseInvalidFreePolicy("Report"));
}

}  // namespace
}  // namespace hardalloc
