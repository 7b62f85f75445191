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

#include "hardalloc/arraylist.h"

namespace hardalloc {

std::string_view ToString(SlabStatus status) {
  switch (status) {
    case SlabStatus::kEmpty:
      return "empty";
    case SlabStatus::kPartial:
      return "partial";
    case SlabStatus::kFull:
      return "full";
    case SlabStatus::kQuarantine:
      return "quarantine";
    case SlabStatus::kGuard:
      return "guard";
    case SlabStatus::kUnused:
      return "unused";
  }
  return "?";
}

ArrayList::ArrayList(std::span<Cell> cells) : cells_(cells) {
  head_.fill(kNil);
  for (Cell& c : cells_) c = Cell{};
}

std::optional<std::size_t> ArrayList::Head(SlabStatus list) const {
  if (list == SlabStatus::kUnused) return std::nullopt;
  const std::uint32_t h = head_[Slot(list)];
  if (h == kNil) return std::nullopt;
  return h;
}

std::optional<std::size_t> ArrayList::QuarantineTail() const {
  if (quarantine_tail_ == kNil) return std::nullopt;
  return quarantine_tail_;
}

void ArrayList::Unlink(std::uint32_t i) {
  Cell& c = cells_[i];
  const std::size_t list = Slot(c.status);
  if (c.prev != kNil) {
    cells_[c.prev].next = c.next;
  } else {
    head_[list] = c.next;
  }
  if (c.next != kNil) {
    cells_[c.next].prev = c.prev;
  } else if (c.status == SlabStatus::kQuarantine) {
    quarantine_tail_ = c.prev;
  }
  c.prev = kNil;
  c.next = kNil;
  --count_[list];
}

void ArrayList::PushHead(std::uint32_t i, SlabStatus list) {
  Cell& c = cells_[i];
  c.status = list;
  c.prev = kNil;
  c.next = head_[Slot(list)];
  if (c.next != kNil) cells_[c.next].prev = i;
  head_[Slot(list)] = i;
  ++count_[Slot(list)];
}

std::optional<std::size_t> ArrayList::Extend(SlabStatus status) {
  if (status != SlabStatus::kEmpty && status != SlabStatus::kGuard)
    return std::nullopt;
  if (last_used_ >= cells_.size()) return std::nullopt;
  const auto i = static_cast<std::uint32_t>(last_used_++);
  PushHead(i, status);
  return i;
}

bool ArrayList::Move(std::size_t i, SlabStatus to) {
  if (i >= last_used_) return false;
  const SlabStatus from = cells_[i].status;
  if (from == SlabStatus::kGuard || from == SlabStatus::kUnused) return false;
  if (to != SlabStatus::kEmpty && to != SlabStatus::kPartial &&
      to != SlabStatus::kFull)
    return false;
  Unlink(static_cast<std::uint32_t>(i));
  PushHead(static_cast<std::uint32_t>(i), to);
  return true;
}

bool ArrayList::EnqueueQuarantine(std::size_t i) {
  if (i >= last_used_) return false;
  const SlabStatus from = cells_[i].status;
  if (from != SlabStatus::kEmpty && from != SlabStatus::kPartial &&
      from != SlabStatus::kFull)
    return false;
  const auto idx = static_cast<std::uint32_t>(i);
  Unlink(idx);
  Cell& c = cells_[idx];
  c.status = SlabStatus::kQuarantine;
  c.next = kNil;
  c.prev = quarantine_tail_;
  if (quarantine_tail_ != kNil) {
    cells_[quarantine_tail_].next = idx;
  } else {
    head_[Slot(SlabStatus::kQuarantine)] = idx;
  }
  quarantine_tail_ = idx;
  ++count_[Slot(SlabStatus::kQuarantine)];
  return true;
}

std::optional<std::size_t> ArrayList::DequeueQuarantine() {
  const std::uint32_t h = head_[Slot(SlabStatus::kQuarantine)];
  if (h == kNil) return std::nullopt;
  Unlink(h);
  PushHead(h, SlabStatus::kEmpty);
  return h;
}

std::vector<std::size_t> ArrayList::Members(SlabStatus list) const {
  std::vector<std::size_t> out;
  if (list == SlabStatus::kUnused) return out;
  std::uint32_t cur = head_[Slot(list)];
  while (cur != kNil && cur < last_used_ && out.size() <= last_used_) {
    out.push_back(cur);
    cur = cells_[cur].next;
  }
  return out;
}

std::vector<std::string> ArrayList::Validate() const {
  std::vector<std::string> errors;
  std::vector<std::uint8_t> seen(last_used_, 0);

  for (std::size_t l = 0; l < kNumStatusLists; ++l) {
    const auto status = static_cast<SlabStatus>(l);
    const std::string name(ToString(status));
    std::uint32_t cur = head_[l];
    std::uint32_t prev = kNil;
    std::size_t count = 0;
    bool broken = false;
    while (cur != kNil) {
      if (count > last_used_) {
        errors.push_back(name + ": cyclic list");
        broken = true;
        break;
      }
      if (cur >= last_used_) {
        errors.push_back(name + ": index " + std::to_string(cur) + " out of bounds");
        broken = true;
        break;
      }
      const Cell& c = cells_[cur];
      if (c.status != status)
        errors.push_back(name + ": cell " + std::to_string(cur) + " has status " +
                         std::string(ToString(c.status)));
      if (c.prev != prev)
        errors.push_back(name + ": cell " + std::to_string(cur) + " prev link mismatch");
      if (seen[cur]++ != 0)
        errors.push_back("partition: cell " + std::to_string(cur) + " reached twice");
      prev = cur;
      cur = c.next;
      ++count;
    }
    if (!broken && count != count_[l])
      errors.push_back(name + ": length " + std::to_string(count) +
                       " disagrees with counter " + std::to_string(count_[l]));
    if (!broken && status == SlabStatus::kQuarantine && prev != quarantine_tail_)
      errors.push_back("quarantine: tail index mismatch");
  }

  for (std::size_t i = 0; i < last_used_; ++i) {
    if (seen[i] == 0)
      errors.push_back("partition: cell " + std::to_string(i) + " is in no list");
  }
  for (std::size_t i = last_used_; i < cells_.size(); ++i) {
    const Cell& c = cells_[i];
    if (c.status != SlabStatus::kUnused || c.prev != kNil || c.next != kNil) {
      errors.push_back("unused cell " + std::to_string(i) + " is linked");
      break;
    }
  }
  return errors;
}

}  // namespace hardalloc
