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

#ifndef HARDALLOC_METADATA_ARENA_H_
#define HARDALLOC_METADATA_ARENA_H_

#include <cstddef>
#include <memory>
#include <new>
#include <span>
#include <utility>

#include "hardalloc/provider.h"

namespace hardalloc {

// Bump allocator over the metadata region. Nothing is ever freed; objects are
// destroyed by their owner before the region is unmapped.
class MetadataArena {
 public:
  static constexpr std::size_t kAlign = 64;

  explicit MetadataArena(Region* region) : region_(region) {}

  // Bytes an array of `n` T occupies, including alignment slack.
  template <typename T>
  static constexpr std::size_t Footprint(std::size_t n) {
    return (n * sizeof(T) + kAlign - 1) / kAlign * kAlign;
  }

  template <typename T>
  std::span<T> AllocateArray(std::size_t n) {
    static_assert(alignof(T) <= kAlign);
    const std::size_t bytes = Footprint<T>(n);
    if (region_ == nullptr || bytes > region_->length_bytes() - used_) return {};
    T* p = reinterpret_cast<T*>(region_->base() + used_);
    used_ += bytes;
    std::uninitialized_default_construct_n(p, n);
    return {p, n};
  }

  template <typename T, typename... Args>
  T* Create(Args&&... args) {
    static_assert(alignof(T) <= kAlign);
    const std::size_t bytes = Footprint<T>(1);
    if (region_ == nullptr || bytes > region_->length_bytes() - used_) return nullptr;
    void* p = region_->base() + used_;
    used_ += bytes;
    return ::new (p) T(std::forward<Args>(args)...);
  }

  bool Contains(const void* p) const {
    return region_ != nullptr && region_->Contains(p);
  }
  std::size_t used() const { return used_; }
  Region* region() const { return region_; }

 private:
  Region* region_;
  std::size_t used_ = 0;
};

}  // namespace hardalloc

#endif  // HARDALLOC_METADATA_ARENA_H_
