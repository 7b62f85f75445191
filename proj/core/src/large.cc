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

#include "hardalloc/large.h"

#include "hardalloc/config.h"
#include "hardalloc/lock.h"

namespace hardalloc {

void* LargeAllocator::Malloc(std::size_t size) {
  if (size == 0 || size > (std::size_t{1} << 47)) return nullptr;
  const std::size_t bytes = (size + kPageSize - 1) / kPageSize * kPageSize;
  Region* region = provider_.Reserve(bytes, RegionKind::kLarge);
  if (region == nullptr) return nullptr;
  const auto key = reinterpret_cast<std::uintptr_t>(region->base());
  const auto inserted =
      WithLock(mu_, [&] { return map_.Insert(key, bytes); });
  if (inserted != AvlMap::InsertResult::kInserted) {
    provider_.Unreserve(region->base());
    return nullptr;
  }
  return region->base();
}

bool LargeAllocator::Free(void* p) {
  const auto key = reinterpret_cast<std::uintptr_t>(p);
  const auto removed = WithLock(mu_, [&] { return map_.Remove(key); });
  if (!removed) return false;
  provider_.Unreserve(p);
  return true;
}

std::optional<std::size_t> LargeAllocator::SizeOf(const void* p) {
  const auto key = reinterpret_cast<std::uintptr_t>(p);
  return WithLock(mu_, [&] { return map_.Find(key); });
}

std::size_t LargeAllocator::count() {
  return WithLock(mu_, [&] { return map_.size(); });
}

std::vector<std::pair<std::uintptr_t, std::size_t>> LargeAllocator::Blocks() {
  return WithLock(mu_, [&] { return map_.InOrder(); });
}

std::vector<std::string> LargeAllocator::Validate() {
  std::vector<std::string> errors;
  std::vector<std::pair<std::uintptr_t, std::size_t>> blocks;
  {
    ScopedLock lock(mu_);
    errors = map_.Validate();
    blocks = map_.InOrder();
  }
  std::uintptr_t prev_end = 0;
  for (const auto& [key, size] : blocks) {
    const auto* p = reinterpret_cast<const void*>(key);
    const Region* r = provider_.Find(p);
    if (r == nullptr || r->base() != p || r->kind() != RegionKind::kLarge) {
      errors.push_back("large: key " + std::to_string(key) + " has no mapping");
      continue;
    }
    if (r->length_bytes() != size)
      errors.push_back("large: recorded size disagrees with mapping at " +
                       std::to_string(key));
    if (key < prev_end) errors.push_back("large: overlapping spans");
    prev_end = key + size;
  }
  return errors;
}

}  // namespace hardalloc
