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

namespace hardalloc {

std::optional<SlotBitmap> SlotBitmap::Create(std::size_t nb_slots) {
  if (nb_slots > kMaxSlotsPerSlab) return std::nullopt;
  SlotBitmap b;
  b.nb_slots_ = static_cast<std::uint16_t>(nb_slots);
  for (std::size_t w = 0; w < kWords; ++w) {
    const std::size_t lo = w * 64;
    if (nb_slots >= lo + 64) {
      b.words_[w] = ~std::uint64_t{0};
    } else if (nb_slots > lo) {
      b.words_[w] = (std::uint64_t{1} << (nb_slots - lo)) - 1;
    }
  }
  return b;
}

bool SlotBitmap::TailClear() const {
  for (std::size_t w = 0; w < kWords; ++w) {
    const std::size_t lo = w * 64;
    std::uint64_t valid = 0;
    if (nb_slots_ >= lo + 64) {
      valid = ~std::uint64_t{0};
    } else if (nb_slots_ > lo) {
      valid = (std::uint64_t{1} << (nb_slots_ - lo)) - 1;
    }
    if ((words_[w] & ~valid) != 0) return false;
  }
  return true;
}

}  // namespace hardalloc
