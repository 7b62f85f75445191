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

#include "hardalloc/harness/shadow.h"

#include <algorithm>
#include <cstdio>
#include <iterator>

namespace hardalloc::harness {
namespace {

std::string Hex(std::uintptr_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "0x%zx", static_cast<std::size_t>(v));
  return buf;
}

}  // namespace

std::vector<std::string> ShadowModel::CheckFresh(std::uint64_t id,
                                                 const ShadowBlock& b,
                                                 std::size_t alignment) const {
  std::vector<std::string> errors;
  const std::string who = "id " + std::to_string(id) + " at " + Hex(b.addr) + ": ";
  if (b.addr % alignment != 0)
    errors.push_back(who + "not " + std::to_string(alignment) + "-aligned");
  if (b.usable < b.requested)
    errors.push_back(who + "usable " + std::to_string(b.usable) + " < requested " +
                     std::to_string(b.requested));
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(b.addr);
  for (std::size_t i = 0; i < b.requested; ++i) {
    const auto it = b.written.find(i);
    const std::uint8_t want = it == b.written.end() ? 0 : it->second;
    if (bytes[i] != want) {
      errors.push_back(who + "byte " + std::to_string(i) + " is " +
                       std::to_string(bytes[i]) + ", expected " + std::to_string(want));
      break;
    }
  }
  return errors;
}

std::optional<std::string> ShadowModel::Insert(std::uint64_t id, ShadowBlock block) {
  const std::uintptr_t begin = block.addr;
  const std::uintptr_t end = begin + std::max<std::size_t>(block.usable, 1);
  std::optional<std::string> error;
  auto next = intervals_.lower_bound(begin);
  if (next != intervals_.end() && next->first < end) {
    error = "id " + std::to_string(id) + " overlaps live id " +
            std::to_string(owners_.at(next->first));
  } else if (next != intervals_.begin()) {
    auto prev = std::prev(next);
    if (prev->second > begin)
      error = "id " + std::to_string(id) + " overlaps live id " +
              std::to_string(owners_.at(prev->first));
  }
  if (!error) {
    intervals_.emplace(begin, end);
    owners_.emplace(begin, id);
  }
  blocks_[id] = std::move(block);
  return error;
}

std::vector<std::string> ShadowModel::OnAlloc(std::uint64_t id, const void* p,
                                              std::size_t requested,
                                              std::size_t usable,
                                              std::size_t alignment) {
  ShadowBlock b;
  b.addr = reinterpret_cast<std::uintptr_t>(p);
  b.requested = requested;
  b.usable = usable;
  auto errors = CheckFresh(id, b, alignment);
  if (auto overlap = Insert(id, std::move(b))) errors.push_back(*overlap);
  return errors;
}

std::vector<std::string> ShadowModel::OnRealloc(std::uint64_t id, const void* p,
                                                std::size_t requested,
                                                std::size_t usable,
                                                std::size_t preserved) {
  ShadowBlock old = OnFree(id).value_or(ShadowBlock{});
  ShadowBlock b;
  b.addr = reinterpret_cast<std::uintptr_t>(p);
  b.requested = requested;
  b.usable = usable;
  for (const auto& [off, byte] : old.written) {
    if (off < preserved) b.written.emplace(off, byte);
  }
  auto errors = CheckFresh(id, b, 16);
  if (auto overlap = Insert(id, std::move(b))) errors.push_back(*overlap);
  return errors;
}

std::optional<ShadowBlock> ShadowModel::OnFree(std::uint64_t id) {
  auto it = blocks_.find(id);
  if (it == blocks_.end()) return std::nullopt;
  ShadowBlock b = std::move(it->second);
  blocks_.erase(it);
  auto own = owners_.find(b.addr);
  if (own != owners_.end() && own->second == id) {
    owners_.erase(own);
    intervals_.erase(b.addr);
  }
  return b;
}

void ShadowModel::OnWrite(std::uint64_t id, std::size_t offset, std::uint8_t byte) {
  auto it = blocks_.find(id);
  if (it == blocks_.end()) return;
  if (byte == 0) {
    it->second.written.erase(offset);
  } else {
    it->second.written[offset] = byte;
  }
}

std::uint8_t ShadowModel::Expected(std::uint64_t id, std::size_t offset) const {
  const ShadowBlock* b = Find(id);
  if (b == nullptr) return 0;
  const auto it = b->written.find(offset);
  return it == b->written.end() ? 0 : it->second;
}

const ShadowBlock* ShadowModel::Find(std::uint64_t id) const {
  auto it = blocks_.find(id);
  return it == blocks_.end() ? nullptr : &it->second;
}

std::optional<std::uint64_t> ShadowModel::Owner(std::uintptr_t addr) const {
  auto it = intervals_.upper_bound(addr);
  if (it == intervals_.begin()) return std::nullopt;
  --it;
  if (addr >= it->second) return std::nullopt;
  return owners_.at(it->first);
}

std::optional<std::string> FindOverlap(
    const std::vector<const std::map<std::uintptr_t, std::uintptr_t>*>& sets) {
  std::vector<std::pair<std::uintptr_t, std::uintptr_t>> all;
  for (const auto* s : sets) all.insert(all.end(), s->begin(), s->end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].first < all[i - 1].second)
      return "ranges [" + Hex(all[i - 1].first) + ", " + Hex(all[i - 1].second) +
             ") and [" + Hex(all[i].first) + ", " + Hex(all[i].second) + ") overlap";
  }
  return std::nullopt;
}

}  // namespace hardalloc::harness
