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

#ifndef HARDALLOC_SLAB_H_
#define HARDALLOC_SLAB_H_

#include <cstddef>
#include <cstdint>
#include <optional>

#include "hardalloc/config.h"
#include "hardalloc/provider.h"

namespace hardalloc {

inline constexpr std::size_t SlotCount(std::size_t slot_size) {
  return kPageSize / slot_size;
}

struct SlotPosition {
  std::size_t slab = 0;
  std::size_t slot = 0;

  friend bool operator==(const SlotPosition&, const SlotPosition&) = default;
};

// One slot of one slab inside a class's span of `region`.
struct SlotRef {
  Region* region = nullptr;
  std::size_t class_base = 0;  // byte offset of the class span in region
  std::size_t slab = 0;
  std::size_t slot = 0;
  std::size_t slot_size = 0;

  std::size_t offset() const {
    return class_base + slab * kPageSize + slot * slot_size;
  }
  std::byte* data() const { return region->base() + offset(); }
};

inline std::size_t SlotOffset(const SlotRef& s) { return s.offset(); }

// Inverse of SlotOffset. std::nullopt when `byte_offset` is not the start of
// a slot that fits in its page.
std::optional<SlotPosition> Locate(std::size_t class_base,
                                   std::size_t slot_size,
                                   std::size_t byte_offset);

// The canary occupies the last `size` bytes of a slot and holds the first
// `size` little-endian bytes of `magic`.
struct CanarySpec {
  std::uint64_t magic = 0;
  std::size_t size = 0;
};

// Overwrites the whole slot with zeros in a way the compiler cannot elide.
std::optional<Fault> ZeroSlot(const SlotRef& s);

// True when the first `prefix` bytes of the slot are zero.
bool IsSlotZero(const SlotRef& s, std::size_t prefix);
inline bool IsSlotZero(const SlotRef& s) { return IsSlotZero(s, s.slot_size); }

void WriteCanary(const SlotRef& s, const CanarySpec& canary);
bool CheckCanary(const SlotRef& s, const CanarySpec& canary);

}  // namespace hardalloc

#endif  // HARDALLOC_SLAB_H_
