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

#ifndef HARDALLOC_AVL_MAP_H_
#define HARDALLOC_AVL_MAP_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hardalloc {

struct AvlNode {
  static constexpr std::uint32_t kNil = 0xFFFFFFFFu;

  std::uintptr_t key = 0;
  std::size_t size = 0;
  std::uint32_t left = kNil;  // doubles as the free-list link
  std::uint32_t right = kNil;
  std::int32_t height = 0;
};

// Address -> length map backed by a fixed pool of nodes. Nodes are handles
// into the pool, so the map never allocates.
class AvlMap {
 public:
  static constexpr std::uint32_t kNil = AvlNode::kNil;

  enum class InsertResult { kInserted, kDuplicate, kPoolExhausted };

  explicit AvlMap(std::span<AvlNode> pool);

  InsertResult Insert(std::uintptr_t key, std::size_t size);
  std::optional<std::size_t> Find(std::uintptr_t key) const;
  std::optional<std::size_t> Remove(std::uintptr_t key);

  std::size_t size() const { return count_; }
  std::size_t capacity() const { return pool_.size(); }
  std::optional<std::uintptr_t> RootKey() const;
  int Height() const { return HeightOf(root_); }

  // (key, size) pairs in key order.
  std::vector<std::pair<std::uintptr_t, std::size_t>> InOrder() const;

  // BST order, stored heights, balance factors and node count.
  std::vector<std::string> Validate() const;

 private:
  int HeightOf(std::uint32_t n) const { return n == kNil ? 0 : pool_[n].height; }
  void Update(std::uint32_t n);
  std::uint32_t RotateLeft(std::uint32_t n);
  std::uint32_t RotateRight(std::uint32_t n);
  std::uint32_t Rebalance(std::uint32_t n);
  std::uint32_t InsertAt(std::uint32_t n, std::uint32_t fresh, bool& duplicate);
  std::uint32_t RemoveAt(std::uint32_t n, std::uintptr_t key,
                         std::optional<std::size_t>& removed);
  std::uint32_t DetachMin(std::uint32_t n, std::uint32_t& min);

  std::span<AvlNode> pool_;
  std::uint32_t root_ = kNil;
  std::uint32_t free_ = kNil;
  std::size_t count_ = 0;
};

}  // namespace hardalloc

#endif  // HARDALLOC_AVL_MAP_H_
