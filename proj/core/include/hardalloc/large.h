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

#ifndef HARDALLOC_LARGE_H_
#define HARDALLOC_LARGE_H_

#include <cstddef>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hardalloc/avl_map.h"
#include "hardalloc/provider.h"

namespace hardalloc {

// Requests above the page size: each block is its own page-granular mapping,
// recorded in an AVL map from address to mapped length under a single lock.
class LargeAllocator {
 public:
  LargeAllocator(PageProvider& provider, std::span<AvlNode> pool)
      : provider_(provider), map_(pool) {}

  // Maps ceil(size / page) pages. nullptr on mapping failure or when the
  // node pool is exhausted.
  void* Malloc(std::size_t size);
  // False, with no state change, if `p` is not a live large block.
  bool Free(void* p);
  // Mapped length of a live block.
  std::optional<std::size_t> SizeOf(const void* p);

  std::size_t count();
  // AVL shape plus agreement between the map and the provider's mappings.
  std::vector<std::string> Validate();
  std::vector<std::pair<std::uintptr_t, std::size_t>> Blocks();

  AvlMap& map_for_testing() { return map_; }

 private:
  PageProvider& provider_;
  std::mutex mu_;
  AvlMap map_;
};

}  // namespace hardalloc

#endif  // HARDALLOC_LARGE_H_
