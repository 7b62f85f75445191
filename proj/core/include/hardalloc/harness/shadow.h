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

#ifndef HARDALLOC_HARNESS_SHADOW_H_
#define HARDALLOC_HARNESS_SHADOW_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hardalloc::harness {

struct ShadowBlock {
  std::uintptr_t addr = 0;
  std::size_t requested = 0;
  std::size_t usable = 0;
  // Bytes the client stored; every other byte below `requested` must be 0.
  std::map<std::size_t, std::uint8_t> written;
};

// Client-side model of the heap: what each live id should look like and
// which address ranges are in use.
class ShadowModel {
 public:
  // Records a fresh block and returns the violated malloc postconditions:
  // alignment, usable >= requested, zero fill of [0, requested), and
  // disjointness from every live block.
  std::vector<std::string> OnAlloc(std::uint64_t id, const void* p,
                                   std::size_t requested, std::size_t usable,
                                   std::size_t alignment);

  // Replaces a block after a successful realloc. Contents below
  // `preserved` carry over; the new block is checked like OnAlloc, except
  // that carried-over bytes must equal what was written.
  std::vector<std::string> OnRealloc(std::uint64_t id, const void* p,
                                     std::size_t requested, std::size_t usable,
                                     std::size_t preserved);

  std::optional<ShadowBlock> OnFree(std::uint64_t id);

  void OnWrite(std::uint64_t id, std::size_t offset, std::uint8_t byte);
  std::uint8_t Expected(std::uint64_t id, std::size_t offset) const;

  const ShadowBlock* Find(std::uint64_t id) const;
  // Id of the live block whose range contains `addr`, if any.
  std::optional<std::uint64_t> Owner(std::uintptr_t addr) const;
  std::size_t live_count() const { return blocks_.size(); }
  const std::unordered_map<std::uint64_t, ShadowBlock>& blocks() const {
    return blocks_;
  }
  // Live [begin, end) ranges keyed by begin.
  const std::map<std::uintptr_t, std::uintptr_t>& intervals() const {
    return intervals_;
  }

 private:
  std::vector<std::string> CheckFresh(std::uint64_t id, const ShadowBlock& b,
                                      std::size_t alignment) const;
  std::optional<std::string> Insert(std::uint64_t id, ShadowBlock block);

  std::unordered_map<std::uint64_t, ShadowBlock> blocks_;
  std::map<std::uintptr_t, std::uintptr_t> intervals_;
  std::map<std::uintptr_t, std::uint64_t> owners_;
};

// Pairwise-disjointness check over the union of several interval sets.
// Returns a description of the first overlap found.
std::optional<std::string> FindOverlap(
    const std::vector<const std::map<std::uintptr_t, std::uintptr_t>*>& sets);

}  // namespace hardalloc::harness

#endif  // HARDALLOC_HARNESS_SHADOW_H_
