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

#ifndef HARDALLOC_CONFIG_H_
#define HARDALLOC_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hardalloc {

inline constexpr std::size_t kPageSize = 4096;
inline constexpr std::size_t kMinAlignment = 16;
// 4096 / 16: the smallest class packs 256 slots into one page.
inline constexpr std::size_t kMaxSlotsPerSlab = kPageSize / kMinAlignment;

enum class InvalidFreePolicy { kIgnore, kReport, kAbort };

// What sc_malloc does when a slot that should be zero is not.
enum class ZeroCheckPolicy {
  // Poison the slot and keep looking for another one.
  kSkipSlot,
  // Poison the slot and fail the whole request.
  kFailRequest,
};

std::string_view ToString(InvalidFreePolicy policy);
std::optional<InvalidFreePolicy> ParseInvalidFreePolicy(std::string_view text);

// Static allocator parameters. Immutable once an allocator is built from it.
struct AllocConfig {
  std::size_t page_size = kPageSize;
  std::vector<std::size_t> sc_sizes;
  std::size_t nb_arenas = 4;
  std::size_t slabs_per_class = 1024;
  // Every guard_interval-th slab is a guard slab. 0 or 1 disables guards.
  std::size_t guard_interval = 2;
  std::size_t quarantine_capacity = 32;
  bool canary_enabled = true;
  std::size_t canary_size = 8;
  std::uint64_t canary_magic = 0xC0DEC0FFEEBADA55ULL;
  bool zero_check_enabled = true;
  ZeroCheckPolicy zero_check_policy = ZeroCheckPolicy::kSkipSlot;
  InvalidFreePolicy invalid_free_policy = InvalidFreePolicy::kReport;
  // Capacity of the large-allocation node pool.
  std::size_t large_map_capacity = std::size_t{1} << 16;

  std::size_t nb_classes() const { return sc_sizes.size(); }
  std::size_t canary_budget() const { return canary_enabled ? canary_size : 0; }

  // Returns an empty string when the configuration is usable, otherwise a
  // description of the first violated constraint.
  std::string Validate() const;
};

AllocConfig DefaultConfig();

// Smallest class whose slot can hold `request` bytes plus the canary and whose
// placement guarantees `alignment`. std::nullopt means the request belongs to
// the large-allocation path.
std::optional<std::size_t> ClassIndexFor(std::size_t request,
                                         std::size_t alignment,
                                         const AllocConfig& cfg);

// True when slots of `class_size` placed in page-aligned slabs are always
// `alignment`-aligned under the class selection rule.
bool ClassSatisfiesAlignment(std::size_t class_size, std::size_t alignment);

std::size_t UsableSizeOfClass(std::size_t class_index, const AllocConfig& cfg);

// Applies HARDALLOC_* overrides. `lookup` mirrors getenv: it returns nullptr
// for unset variables. Returns an error message for malformed values.
std::string ApplyEnvironmentOverrides(
    AllocConfig& cfg,
    const std::function<const char*(const char*)>& lookup);

// Same, reading the process environment.
std::string ApplyEnvironmentOverrides(AllocConfig& cfg);

}  // namespace hardalloc

#endif  // HARDALLOC_CONFIG_H_
