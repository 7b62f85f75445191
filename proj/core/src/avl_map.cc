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

#include "hardalloc/avl_map.h"

#include <algorithm>
#include <functional>

namespace hardalloc {

AvlMap::AvlMap(std::span<AvlNode> pool) : pool_(pool) {
  for (std::size_t i = pool_.size(); i-- > 0;) {
    pool_[i] = AvlNode{};
    pool_[i].left = free_;
    free_ = static_cast<std::uint32_t>(i);
  }
}

std::optional<std::uintptr_t> AvlMap::RootKey() const {
  if (root_ == kNil) return std::nullopt;
  return pool_[root_].key;
}

void AvlMap::Update(std::uint32_t n) {
  AvlNode& node = pool_[n];
  node.height = 1 + std::max(HeightOf(node.left), HeightOf(node.right));
}

std::uint32_t AvlMap::RotateLeft(std::uint32_t n) {
  const std::uint32_t r = pool_[n].right;
  pool_[n].right = pool_[r].left;
  pool_[r].left = n;
  Update(n);
  Update(r);
  return r;
}

std::uint32_t AvlMap::RotateRight(std::uint32_t n) {
  const std::uint32_t l = pool_[n].left;
  pool_[n].left = pool_[l].right;
  pool_[l].right = n;
  Update(n);
  Update(l);
  return l;
}

std::uint32_t AvlMap::Rebalance(std::uint32_t n) {
  Update(n);
  AvlNode& node = pool_[n];
  const int balance = HeightOf(node.left) - HeightOf(node.right);
  if (balance > 1) {
    const AvlNode& l = pool_[node.left];
    if (HeightOf(l.left) < HeightOf(l.right)) node.left = RotateLeft(node.left);
    return RotateRight(n);
  }
  if (balance < -1) {
    const AvlNode& r = pool_[node.right];
    if (HeightOf(r.right) < HeightOf(r.left)) node.right = RotateRight(node.right);
    return RotateLeft(n);
  }
  return n;
}

std::uint32_t AvlMap::InsertAt(std::uint32_t n, std::uint32_t fresh,
                               bool& duplicate) {
  if (n == kNil) return fresh;
  const std::uintptr_t key = pool_[fresh].key;
  if (key == pool_[n].key) {
    duplicate = true;
    return n;
  }
  if (key < pool_[n].key) {
    pool_[n].left = InsertAt(pool_[n].left, fresh, duplicate);
  } else {
    pool_[n].right = InsertAt(pool_[n].right, fresh, duplicate);
  }
  return duplicate ? n : Rebalance(n);
}

AvlMap::InsertResult AvlMap::Insert(std::uintptr_t key, std::size_t size) {
  if (Find(key)) return InsertResult::kDuplicate;
  if (free_ == kNil) return InsertResult::kPoolExhausted;
  const std::uint32_t fresh = free_;
  free_ = pool_[fresh].left;
  pool_[fresh] = AvlNode{key, size, kNil, kNil, 1};
  bool duplicate = false;
  root_ = InsertAt(root_, fresh, duplicate);
  ++count_;
  return InsertResult::kInserted;
}

std::optional<std::size_t> AvlMap::Find(std::uintptr_t key) const {
  std::uint32_t n = root_;
  while (n != kNil) {
    const AvlNode& node = pool_[n];
    if (key == node.key) return node.size;
    n = key < node.key ? node.left : node.right;
  }
  return std::nullopt;
}

std::uint32_t AvlMap::DetachMin(std::uint32_t n, std::uint32_t& min) {
  if (pool_[n].left == kNil) {
    min = n;
    return pool_[n].right;
  }
  pool_[n].left = DetachMin(pool_[n].left, min);
  return Rebalance(n);
}

std::uint32_t AvlMap::RemoveAt(std::uint32_t n, std::uintptr_t key,
                               std::optional<std::size_t>& removed) {
  if (n == kNil) return kNil;
  AvlNode& node = pool_[n];
  if (key < node.key) {
    node.left = RemoveAt(node.left, key, removed);
  } else if (key > node.key) {
    node.right = RemoveAt(node.right, key, removed);
  } else {
    removed = node.size;
    const std::uint32_t l = node.left;
    const std::uint32_t r = node.right;
    pool_[n] = AvlNode{};
    pool_[n].left = free_;
    free_ = n;
    if (l == kNil) return r;
    if (r == kNil) return l;
    std::uint32_t successor = kNil;
    const std::uint32_t rest = DetachMin(r, successor);
    pool_[successor].left = l;
    pool_[successor].right = rest;
    return Rebalance(successor);
  }
  return removed ? Rebalance(n) : n;
}

std::optional<std::size_t> AvlMap::Remove(std::uintptr_t key) {
  std::optional<std::size_t> removed;
  root_ = RemoveAt(root_, key, removed);
  if (removed) --count_;
  return removed;
}

std::vector<std::pair<std::uintptr_t, std::size_t>> AvlMap::InOrder() const {
  std::vector<std::pair<std::uintptr_t, std::size_t>> out;
  out.reserve(count_);
  std::function<void(std::uint32_t)> walk = [&](std::uint32_t n) {
    if (n == kNil || out.size() > pool_.size()) return;
    walk(pool_[n].left);
    out.emplace_back(pool_[n].key, pool_[n].size);
    walk(pool_[n].right);
  };
  walk(root_);
  return out;
}

std::vector<std::string> AvlMap::Validate() const {
  std::vector<std::string> errors;
  std::size_t visited = 0;
  // Returns the computed height; checks keys lie in (lo, hi).
  std::function<int(std::uint32_t, std::optional<std::uintptr_t>,
                    std::optional<std::uintptr_t>)>
      check = [&](std::uint32_t n, std::optional<std::uintptr_t> lo,
                  std::optional<std::uintptr_t> hi) -> int {
    if (n == kNil) return 0;
    if (n >= pool_.size()) {
      errors.push_back("avl: node handle out of pool");
      return 0;
    }
    if (++visited > pool_.size()) {
      errors.push_back("avl: cycle detected");
      return 0;
    }
    const AvlNode& node = pool_[n];
    if ((lo && node.key <= *lo) || (hi && node.key >= *hi))
      errors.push_back("avl: BST order violated at key " + std::to_string(node.key));
    const int lh = check(node.left, lo, node.key);
    const int rh = check(node.right, node.key, hi);
    const int h = 1 + std::max(lh, rh);
    if (node.height != h)
      errors.push_back("avl: stale height at key " + std::to_string(node.key));
    if (lh - rh > 1 || rh - lh > 1)
      errors.push_back("avl: balance factor out of range at key " +
                       std::to_string(node.key));
    return h;
  };
  check(root_, std::nullopt, std::nullopt);
  if (visited != count_)
    errors.push_back("avl: reachable nodes " + std::to_string(visited) +
                     " disagree with count " + std::to_string(count_));
  return errors;
}

}  // namespace hardalloc
