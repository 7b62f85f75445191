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

#include <string.h>

#include <array>
#include <cstring>

namespace hardalloc {

std::optional<SlotPosition> Locate(std::size_t class_base,
                                   std::size_t slot_size,
                                   std::size_t byte_offset) {
  if (byte_offset < class_base || slot_size == 0) return std::nullopt;
  const std::size_t rel = byte_offset - class_base;
  const std::size_t in_page = rel % kPageSize;
  if (in_page % slot_size != 0) return std::nullopt;
  const std::size_t slot = in_page / slot_size;
  if (slot >= SlotCount(slot_size)) return std::nullopt;
  return SlotPosition{rel / kPageSize, slot};
}

std::optional<Fault> ZeroSlot(const SlotRef& s) {
  const std::size_t page = s.offset() / kPageSize;
  if (s.region->perm(page) != PagePerm::kReadWrite)
    return Fault{s.region->id(), page, FaultKind::kProtNone};
  ::explicit_bzero(s.data(), s.slot_size);
  s.region->Touch(s.offset(), s.slot_size);
  return std::nullopt;
}

bool IsSlotZero(const SlotRef& s, std::size_t prefix) {
  const std::byte* p = s.data();
  // Word-at-a-time; slots are 16-byte aligned and sized.
  std::size_t i = 0;
  for (; i + sizeof(std::uint64_t) <= prefix; i += sizeof(std::uint64_t)) {
    std::uint64_t w;
    std::memcpy(&w, p + i, sizeof(w));
    if (w != 0) return false;
  }
  for (; i < prefix; ++i) {
    if (p[i] != std::byte{0}) return false;
  }
  return true;
}

namespace {

std::array<std::byte, 8> MagicBytes(std::uint64_t magic) {
  std::array<std::byte, 8> out;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<std::byte>((magic >> (8 * i)) & 0xFFu);
  return out;
}

}  // namespace

void WriteCanary(const SlotRef& s, const CanarySpec& canary) {
  const auto bytes = MagicBytes(canary.magic);
  std::memcpy(s.data() + s.slot_size - canary.size, bytes.data(), canary.size);
  s.region->Touch(s.offset() + s.slot_size - canary.size, canary.size);
}

bool CheckCanary(const SlotRef& s, const CanarySpec& canary) {
  const auto bytes = MagicBytes(canary.magic);
  return std::memcmp(s.data() + s.slot_size - canary.size, bytes.data(),
                     canary.size) == 0;
}

}  // namespace hardalloc
