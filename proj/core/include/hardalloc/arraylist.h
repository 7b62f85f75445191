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

// Slab status lists threaded through a fixed array of cells.
//
// Every slab index below the watermark (last_used) sits in exactly one of
// five doubly-linked lists: empty, partial, full, quarantine and guard.
// Indices at or above the watermark are Unused and unlinked. The quarantine
// list is a FIFO queue: enqueue at the tail, dequeue at the head. The other
// lists push at the head.
//
// The cell storage is borrowed, so the structure can live in the metadata
// region. No operation allocates.

#ifndef HARDALLOC_ARRAYLIST_H_
#define HARDALLOC_ARRAYLIST_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hardalloc {

enum class SlabStatus : std::uint8_t {
  kEmpty,
  kPartial,
  kFull,
  kQuarantine,
  kGuard,
  kUnused,
};

inline constexpr std::size_t kNumStatusLists = 5;

std::string_view ToString(SlabStatus status);

struct Cell {
  static constexpr std::uint32_t kNil = 0xFFFFFFFFu;

  SlabStatus status = SlabStatus::kUnused;
  std::uint32_t prev = kNil;
  std::uint32_t next = kNil;
};

class ArrayList {
 public:
  static constexpr std::uint32_t kNil = Cell::kNil;

  // Resets every cell in `cells` to Unused.
  explicit ArrayList(std::span<Cell> cells);

  std::size_t capacity() const { return cells_.size(); }
  std::size_t last_used() const { return last_used_; }
  std::size_t quarantine_len() const { return count_[Slot(SlabStatus::kQuarantine)]; }
  std::size_t count(SlabStatus list) const { return count_[Slot(list)]; }

  // Brings the slab at the watermark into service with status kEmpty or
  // kGuard. std::nullopt when the array is exhausted or `status` is neither.
  std::optional<std::size_t> Extend(SlabStatus status);

  // Relinks slab `i` at the head of `to`. Allowed sources are Empty,
  // Partial, Full and Quarantine; allowed targets Empty, Partial and Full.
  // Returns false and changes nothing otherwise.
  bool Move(std::size_t i, SlabStatus to);

  // Appends slab `i` (Empty, Partial or Full) to the quarantine tail.
  bool EnqueueQuarantine(std::size_t i);
  // Oldest quarantined slab, relinked as Empty.
  std::optional<std::size_t> DequeueQuarantine();

  SlabStatus Status(std::size_t i) const {
    return i < last_used_ ? cells_[i].status : SlabStatus::kUnused;
  }
  std::optional<std::size_t> Head(SlabStatus list) const;
  std::optional<std::size_t> QuarantineTail() const;

  // Members of `list` in link order, bounded by last_used steps.
  std::vector<std::size_t> Members(SlabStatus list) const;

  // Link symmetry, acyclicity, bounds, head/status agreement, partition of
  // [0, last_used), queue tail and counters. Empty result means well formed.
  std::vector<std::string> Validate() const;

  Cell& cell_for_testing(std::size_t i) { return cells_[i]; }

 private:
  static std::size_t Slot(SlabStatus s) { return static_cast<std::size_t>(s); }
  void Unlink(std::uint32_t i);
  void PushHead(std::uint32_t i, SlabStatus list);

  std::span<Cell> cells_;
  std::size_t last_used_ = 0;
  std::array<std::uint32_t, kNumStatusLists> head_;
  std::array<std::size_t, kNumStatusLists> count_{};
  std::uint32_t quarantine_tail_ = kNil;
};

}  // namespace hardalloc

#endif  // HARDALLOC_ARRAYLIST_H_
