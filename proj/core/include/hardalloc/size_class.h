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

// One size class: a span of page-sized slabs in the data region plus the
// segregated metadata tracking them.
//
// Slab lifecycle:
//
//   (unused) --extend--> Empty --alloc--> Partial --alloc--> Full
//                          ^                 |  ^              |
//                          |               free  +----free-----+
//                      dequeue               |
//                          |                 v
//                      Quarantine <--last slot freed (pages released)
//
// Slabs whose index i satisfies i % G == G - 1 (G = guard_interval >= 2) are
// made inaccessible when the watermark reaches them and never leave the guard
// list.
//
// Mutating members named *Locked require the caller to hold mutex(); the
// unsuffixed variants take it themselves.

#ifndef HARDALLOC_SIZE_CLASS_H_
#define HARDALLOC_SIZE_CLASS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hardalloc/arraylist.h"
#include "hardalloc/bitmap.h"
#include "hardalloc/config.h"
#include "hardalloc/metadata_arena.h"
#include "hardalloc/provider.h"
#include "hardalloc/slab.h"

namespace hardalloc {

// Slots that failed the zero check. They stay marked allocated in the
// availability bitmap and are never handed out or accepted by free.
struct PoisonMask {
  std::array<std::uint64_t, SlotBitmap::kWords> words{};

  bool Test(std::size_t i) const { return ((words[i / 64] >> (i % 64)) & 1U) != 0; }
  void Set(std::size_t i) { words[i / 64] |= std::uint64_t{1} << (i % 64); }
  std::size_t Count() const;
};

enum class FreeResult { kFreed, kInvalid, kCorruptCanary };

enum class MallocStatus {
  kOk,
  kExhausted,
  // Zero check failed under ZeroCheckPolicy::kFailRequest.
  kCorrupt,
};

struct SlotAllocation {
  MallocStatus status = MallocStatus::kExhausted;
  std::byte* ptr = nullptr;
};

struct SizeClassStats {
  std::size_t slot_size = 0;
  std::size_t live = 0;
  std::size_t slabs_used = 0;  // watermark, guards included
  std::size_t guard_slabs = 0;
  std::size_t quarantined = 0;
  std::uint64_t allocs = 0;
  std::uint64_t frees = 0;
  std::uint64_t invalid_frees = 0;
  std::uint64_t canary_failures = 0;
  std::uint64_t zero_check_failures = 0;
  std::uint64_t quarantine_recycles = 0;

  std::uint64_t corruption_detected() const {
    return canary_failures + zero_check_failures;
  }
};

class SizeClass {
 public:
  // `class_base` is the byte offset of this class's span inside `data`. All
  // bookkeeping is carved from `metadata`; the object itself may live there
  // too. Check ok() afterwards: it is false if `metadata` ran out.
  SizeClass(const AllocConfig& cfg, std::size_t class_index, Region* data,
            std::size_t class_base, MetadataArena& metadata);
  SizeClass(const SizeClass&) = delete;
  SizeClass& operator=(const SizeClass&) = delete;

  // Metadata bytes one class of `cfg` needs, for sizing the metadata region.
  static std::size_t MetadataFootprint(const AllocConfig& cfg);

  bool ok() const { return ok_; }

  std::mutex& mutex() { return mu_; }

  std::size_t slot_size() const { return slot_size_; }
  std::size_t usable_size() const { return usable_size_; }
  std::size_t slot_count() const { return slot_count_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t class_base() const { return class_base_; }
  std::size_t span_bytes() const { return capacity_ * kPageSize; }
  Region* region() const { return data_; }
  bool InSpan(std::size_t region_offset) const {
    return region_offset >= class_base_ && region_offset - class_base_ < span_bytes();
  }
  bool IsGuardIndex(std::size_t slab) const {
    return guard_interval_ >= 2 && slab % guard_interval_ == guard_interval_ - 1;
  }

  SlotAllocation MallocLocked();
  // `region_offset` is relative to the data region base.
  FreeResult FreeLocked(std::size_t region_offset);
  // True iff the slot at `region_offset` is currently handed out.
  bool IsLiveLocked(std::size_t region_offset) const;
  std::vector<std::string> ValidateLocked() const;
  SizeClassStats StatsLocked() const;

  SlotAllocation Malloc();
  FreeResult Free(std::size_t region_offset);
  std::vector<std::string> Validate();
  SizeClassStats Stats();

  // Read-only and fault-injection access for tests and the harness.
  const ArrayList& cells() const { return cells_; }
  ArrayList& cells_for_testing() { return cells_; }
  SlotBitmap& bitmap_for_testing(std::size_t slab) { return bitmaps_[slab]; }
  const SlotBitmap& bitmap(std::size_t slab) const { return bitmaps_[slab]; }
  struct ByteRange {
    const void* begin;
    std::size_t size;
  };
  // Where this class's bookkeeping lives (object, cells, bitmaps, poison).
  std::vector<ByteRange> MetadataRanges() const;
  SlotRef SlotAt(std::size_t slab, std::size_t slot) const {
    return SlotRef{data_, class_base_, slab, slot, slot_size_};
  }

 private:
  std::optional<std::size_t> PickSlab();
  std::optional<std::size_t> ExtendData();

  std::mutex mu_;
  std::size_t slot_size_;
  std::size_t usable_size_;
  std::size_t slot_count_;
  std::size_t capacity_;
  std::size_t guard_interval_;
  std::size_t quarantine_capacity_;
  bool canary_enabled_;
  CanarySpec canary_;
  bool zero_check_enabled_;
  ZeroCheckPolicy zero_check_policy_;

  Region* data_;
  std::size_t class_base_;
  std::span<Cell> cells_storage_;
  ArrayList cells_;
  std::span<SlotBitmap> bitmaps_;
  std::span<PoisonMask> poison_;
  SizeClassStats stats_;
  bool ok_ = false;
};

}  // namespace hardalloc

#endif  // HARDALLOC_SIZE_CLASS_H_
