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

#include "hardalloc/size_class.h"

#include <bit>

#include "hardalloc/lock.h"

namespace hardalloc {

std::size_t PoisonMask::Count() const {
  std::size_t n = 0;
  for (std::uint64_t w : words) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

SizeClass::SizeClass(const AllocConfig& cfg, std::size_t class_index,
                     Region* data, std::size_t class_base,
                     MetadataArena& metadata)
    : slot_size_(cfg.sc_sizes[class_index]),
      usable_size_(UsableSizeOfClass(class_index, cfg)),
      slot_count_(SlotCount(slot_size_)),
      capacity_(cfg.slabs_per_class),
      guard_interval_(cfg.guard_interval),
      quarantine_capacity_(cfg.quarantine_capacity),
      canary_enabled_(cfg.canary_enabled),
      canary_{cfg.canary_magic, cfg.canary_size},
      zero_check_enabled_(cfg.zero_check_enabled),
      zero_check_policy_(cfg.zero_check_policy),
      data_(data),
      class_base_(class_base),
      cells_storage_(metadata.AllocateArray<Cell>(cfg.slabs_per_class)),
      cells_(cells_storage_),
      bitmaps_(metadata.AllocateArray<SlotBitmap>(cfg.slabs_per_class)),
      poison_(metadata.AllocateArray<PoisonMask>(cfg.slabs_per_class)) {
  stats_.slot_size = slot_size_;
  ok_ = cells_storage_.size() == capacity_ && bitmaps_.size() == capacity_ &&
        poison_.size() == capacity_;
}

std::size_t SizeClass::MetadataFootprint(const AllocConfig& cfg) {
  const std::size_t n = cfg.slabs_per_class;
  return MetadataArena::Footprint<SizeClass>(1) +
         MetadataArena::Footprint<Cell>(n) +
         MetadataArena::Footprint<SlotBitmap>(n) +
         MetadataArena::Footprint<PoisonMask>(n);
}

std::optional<std::size_t> SizeClass::ExtendData() {
  while (true) {
    const std::size_t next = cells_.last_used();
    if (next >= capacity_) return std::nullopt;
    if (IsGuardIndex(next)) {
      cells_.Extend(SlabStatus::kGuard);
      data_->Protect((class_base_ / kPageSize) + next, 1, PagePerm::kNone);
      continue;
    }
    const auto idx = cells_.Extend(SlabStatus::kEmpty);
    bitmaps_[*idx] = *SlotBitmap::Create(slot_count_);
    poison_[*idx] = PoisonMask{};
    return idx;
  }
}

std::optional<std::size_t> SizeClass::PickSlab() {
  if (auto p = cells_.Head(SlabStatus::kPartial)) return p;
  if (auto e = cells_.Head(SlabStatus::kEmpty)) return e;
  if (cells_.quarantine_len() > quarantine_capacity_) {
    ++stats_.quarantine_recycles;
    return cells_.DequeueQuarantine();
  }
  if (auto fresh = ExtendData()) return fresh;
  // Span exhausted: recycle the oldest quarantined slab rather than fail.
  if (auto q = cells_.DequeueQuarantine()) {
    ++stats_.quarantine_recycles;
    return q;
  }
  return std::nullopt;
}

SlotAllocation SizeClass::MallocLocked() {
  while (true) {
    const auto slab = PickSlab();
    if (!slab) return {MallocStatus::kExhausted, nullptr};
    SlotBitmap& bm = bitmaps_[*slab];
    const std::size_t slot = *bm.FindFirstAvailable();
    const SlotRef ref = SlotAt(*slab, slot);
    bm.SetAllocated(slot);

    const bool poisoned = zero_check_enabled_ && !IsSlotZero(ref, usable_size_);
    if (poisoned) {
      poison_[*slab].Set(slot);
      ++stats_.zero_check_failures;
    } else {
      if (canary_enabled_) WriteCanary(ref, canary_);
      data_->Touch(ref.offset(), slot_size_);
      ++stats_.allocs;
      ++stats_.live;
    }

    if (bm.IsFull()) {
      cells_.Move(*slab, SlabStatus::kFull);
    } else if (cells_.Status(*slab) != SlabStatus::kPartial) {
      cells_.Move(*slab, SlabStatus::kPartial);
    }

    if (!poisoned) return {MallocStatus::kOk, ref.data()};
    if (zero_check_policy_ == ZeroCheckPolicy::kFailRequest)
      return {MallocStatus::kCorrupt, nullptr};
  }
}

FreeResult SizeClass::FreeLocked(std::size_t region_offset) {
  const auto pos = InSpan(region_offset)
                       ? Locate(class_base_, slot_size_, region_offset)
                       : std::nullopt;
  const SlabStatus status =
      pos ? cells_.Status(pos->slab) : SlabStatus::kUnused;
  if (!pos ||
      (status != SlabStatus::kPartial && status != SlabStatus::kFull) ||
      bitmaps_[pos->slab].IsAvailable(pos->slot) ||
      poison_[pos->slab].Test(pos->slot)) {
    ++stats_.invalid_frees;
    return FreeResult::kInvalid;
  }

  FreeResult result = FreeResult::kFreed;
  const SlotRef ref = SlotAt(pos->slab, pos->slot);
  if (canary_enabled_ && !CheckCanary(ref, canary_)) {
    ++stats_.canary_failures;
    result = FreeResult::kCorruptCanary;
  }
  ZeroSlot(ref);
  SlotBitmap& bm = bitmaps_[pos->slab];
  bm.SetAvailable(pos->slot);
  ++stats_.frees;
  --stats_.live;

  if (bm.IsEmpty()) {
    cells_.EnqueueQuarantine(pos->slab);
    data_->ReleasePages(class_base_ / kPageSize + pos->slab, 1);
    if (cells_.quarantine_len() > quarantine_capacity_) {
      cells_.DequeueQuarantine();
      ++stats_.quarantine_recycles;
    }
  } else if (status == SlabStatus::kFull) {
    cells_.Move(pos->slab, SlabStatus::kPartial);
  }
  return result;
}

bool SizeClass::IsLiveLocked(std::size_t region_offset) const {
  if (!InSpan(region_offset)) return false;
  const auto pos = Locate(class_base_, slot_size_, region_offset);
  if (!pos) return false;
  const SlabStatus status = cells_.Status(pos->slab);
  if (status != SlabStatus::kPartial && status != SlabStatus::kFull) return false;
  return !bitmaps_[pos->slab].IsAvailable(pos->slot) &&
         !poison_[pos->slab].Test(pos->slot);
}

std::vector<SizeClass::ByteRange> SizeClass::MetadataRanges() const {
  return {
      {this, sizeof(*this)},
      {cells_storage_.data(), cells_storage_.size_bytes()},
      {bitmaps_.data(), bitmaps_.size_bytes()},
      {poison_.data(), poison_.size_bytes()},
  };
}

std::vector<std::string> SizeClass::ValidateLocked() const {
  std::vector<std::string> errors;
  const std::string tag = "class " + std::to_string(slot_size_) + ": ";
  for (std::string& e : cells_.Validate()) errors.push_back(tag + e);

  const std::size_t first_page = class_base_ / kPageSize;
  std::size_t live = 0;
  for (std::size_t i = 0; i < cells_.last_used(); ++i) {
    const SlabStatus status = cells_.Status(i);
    const std::string at = tag + "slab " + std::to_string(i) + " (" +
                           std::string(ToString(status)) + "): ";
    if ((status == SlabStatus::kGuard) != IsGuardIndex(i))
      errors.push_back(at + "guard placement violated");
    if (status == SlabStatus::kGuard) {
      if (data_->perm(first_page + i) != PagePerm::kNone)
        errors.push_back(at + "guard page is accessible");
      continue;
    }
    const SlotBitmap& bm = bitmaps_[i];
    const PoisonMask& poison = poison_[i];
    if (bm.nb_slots() != slot_count_) errors.push_back(at + "bitmap slot count mismatch");
    if (!bm.TailClear()) errors.push_back(at + "bitmap bits set past nb_slots");
    for (std::size_t s = 0; s < SlotBitmap::kWords * 64; ++s) {
      if (poison.Test(s) && (s >= slot_count_ || bm.IsAvailable(s))) {
        errors.push_back(at + "poisoned slot marked available");
        break;
      }
    }
    const std::size_t allocated = bm.CountAllocated();
    live += allocated - poison.Count();
    switch (status) {
      case SlabStatus::kEmpty:
        if (allocated != 0) errors.push_back(at + "slots allocated in empty slab");
        break;
      case SlabStatus::kPartial:
        if (allocated == 0 || allocated == slot_count_)
          errors.push_back(at + "occupancy " + std::to_string(allocated) +
                           " inconsistent with partial");
        break;
      case SlabStatus::kFull:
        if (allocated != slot_count_) errors.push_back(at + "full slab has free slots");
        break;
      case SlabStatus::kQuarantine:
        if (allocated != 0) errors.push_back(at + "slots allocated in quarantined slab");
        if (data_->resident(first_page + i))
          errors.push_back(at + "quarantined slab is resident");
        break;
      default:
        break;
    }
  }
  if (live != stats_.live)
    errors.push_back(tag + "live counter " + std::to_string(stats_.live) +
                     " disagrees with bitmaps " + std::to_string(live));
  for (const ByteRange& r : MetadataRanges()) {
    const auto* b = static_cast<const std::byte*>(r.begin);
    if (r.size != 0 && (data_->Contains(b) || data_->Contains(b + r.size - 1)))
      errors.push_back(tag + "metadata overlaps the data region");
  }
  return errors;
}

SizeClassStats SizeClass::StatsLocked() const {
  SizeClassStats s = stats_;
  s.slabs_used = cells_.last_used();
  s.guard_slabs = cells_.count(SlabStatus::kGuard);
  s.quarantined = cells_.quarantine_len();
  return s;
}

SlotAllocation SizeClass::Malloc() {
  return WithLock(mu_, [&] { return MallocLocked(); });
}

FreeResult SizeClass::Free(std::size_t region_offset) {
  return WithLock(mu_, [&] { return FreeLocked(region_offset); });
}

std::vector<std::string> SizeClass::Validate() {
  return WithLock(mu_, [&] { return ValidateLocked(); });
}

SizeClassStats SizeClass::Stats() {
  return WithLock(mu_, [&] { return StatsLocked(); });
}

}  // namespace hardalloc
