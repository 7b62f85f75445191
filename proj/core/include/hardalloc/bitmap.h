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

#ifndef HARDALLOC_BITMAP_H_
#define HARDALLOC_BITMAP_H_

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>

#include "hardalloc/config.h"

namespace hardalloc {

// Slot availability for one slab. A set bit means the slot is available.
// Bits at positions >= nb_slots are kept clear.
class SlotBitmap {
 public:
  static constexpr std::size_t kWords = kMaxSlotsPerSlab / 64;

  SlotBitmap() = default;

  // All slots available. std::nullopt if nb_slots > 256.
  static std::optional<SlotBitmap> Create(std::size_t nb_slots);

  std::size_t nb_slots() const { return nb_slots_; }

  std::optional<std::size_t> FindFirstAvailable() const {
    for (std::size_t w = 0; w < kWords; ++w) {
      if (words_[w] != 0)
        return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
    }
    return std::nullopt;
  }

  bool IsAvailable(std::size_t i) const {
    return i < nb_slots_ && ((words_[i / 64] >> (i % 64)) & 1U) != 0;
  }

  // Both return false, leaving the bitmap unchanged, when `i` is out of range
  // or already in the target state.
  bool SetAllocated(std::size_t i) {
    if (!IsAvailable(i)) return false;
    words_[i / 64] &= ~(std::uint64_t{1} << (i % 64));
    return true;
  }
  bool SetAvailable(std::size_t i) {
    if (i >= nb_slots_ || IsAvailable(i)) return false;
    words_[i / 64] |= std::uint64_t{1} << (i % 64);
    return true;
  }

  std::size_t CountAvailable() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  std::size_t CountAllocated() const { return nb_slots_ - CountAvailable(); }
  bool IsEmpty() const { return CountAvailable() == nb_slots_; }
  bool IsFull() const { return CountAvailable() == 0; }

  // True when no bit at or above nb_slots is set.
  bool TailClear() const;

  // Raw word access, for fault-injection tests.
  std::array<std::uint64_t, kWords>& words_for_testing() { return words_; }

  friend bool operator==(const SlotBitmap&, const SlotBitmap&) = default;

 private:
  std::array<std::uint64_t, kWords> words_{};
  std::uint16_t nb_slots_ = 0;
};

}  // namespace hardalloc

#endif  // HARDALLOC_BITMAP_H_
