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

// The public allocation interface.
//
// Memory layout: one data region holds every regular allocation, split into
// nb_arenas x nb_classes spans of slabs_per_class pages each, laid out
// contiguously:
//
//   | arena 0: class 0 | class 1 | ... | arena 1: class 0 | ... |
//
// so the class serving an address is found by arithmetic on its offset from
// the region base. A second, disjoint region holds all bookkeeping: size
// class objects, status cells, bitmaps and the large-allocation node pool.
//
// Each thread is bound to one arena on first use (round-robin). Requests of
// at most a page (canary included) go to that arena's size classes; larger
// ones are mapped individually. Every operation takes at most one lock.

#ifndef HARDALLOC_ALLOCATOR_H_
#define HARDALLOC_ALLOCATOR_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hardalloc/config.h"
#include "hardalloc/large.h"
#include "hardalloc/metadata_arena.h"
#include "hardalloc/provider.h"
#include "hardalloc/size_class.h"

namespace hardalloc {

enum class FreeOutcome {
  kNull,
  kFreed,
  kLargeFreed,
  kInvalid,
  kCorruptCanary,  // freed, but the canary had been overwritten
};

std::string_view ToString(FreeOutcome outcome);

// Receives one line per invalid free or detected corruption under
// InvalidFreePolicy::kReport (and just before aborting under kAbort).
using ReportHandler = void (*)(std::string_view message);
void SetReportHandler(ReportHandler handler);
// Discards reports; convenient in tests that provoke them deliberately.
void QuietReportHandler(std::string_view message);

struct ClassLocation {
  std::size_t arena = 0;
  std::size_t class_index = 0;
};

struct AllocatorStats {
  std::vector<SizeClassStats> classes;  // arena-major
  std::size_t large_live = 0;
  std::uint64_t invalid_frees = 0;      // all paths
  std::uint64_t canary_reports = 0;

  std::size_t live() const;
  std::uint64_t corruption_detected() const;
};

class Allocator {
 public:
  // nullptr on invalid configuration or mapping failure; `error` then says
  // why.
  static std::unique_ptr<Allocator> Create(const AllocConfig& cfg,
                                           Backend backend = Backend::kSim,
                                           std::string* error = nullptr);
  ~Allocator();
  Allocator(const Allocator&) = delete;
  Allocator& operator=(const Allocator&) = delete;

  void* Malloc(std::size_t size);
  void Free(void* p) { FreeWithOutcome(p); }
  FreeOutcome FreeWithOutcome(void* p);
  void* Calloc(std::size_t n, std::size_t size);
  void* Realloc(void* p, std::size_t new_size);
  void* AlignedAlloc(std::size_t alignment, std::size_t size);
  // 0 for addresses that are not live blocks.
  std::size_t UsableSize(const void* p);

  std::size_t ArenaOfCurrentThread();

  const AllocConfig& config() const { return cfg_; }
  PageProvider& provider() { return *provider_; }
  Region& data_region() { return *data_; }
  Region& metadata_region() { return *metadata_; }
  std::size_t nb_size_classes() const { return classes_.size(); }
  SizeClass& size_class(std::size_t arena, std::size_t class_index) {
    return *classes_[arena * cfg_.nb_classes() + class_index];
  }
  LargeAllocator& large() { return *large_; }

  // Class owning a data-region address, by arithmetic only.
  std::optional<ClassLocation> LocateRegular(const void* p) const;
  // Byte range of class (arena, class_index) inside the data region.
  std::size_t ClassSpanOffset(std::size_t arena, std::size_t class_index) const;

  // Full invariant sweep. Takes each lock in turn; meaningful when no other
  // thread is mutating the allocator.
  std::vector<std::string> Validate();
  AllocatorStats Stats();
  // Header plus one line per class:
  // arena,class,slot_size,live,slabs_used,quarantined,corruption_detected
  std::string StatsCsv();

 private:
  Allocator(const AllocConfig& cfg, std::unique_ptr<PageProvider> provider);
  bool Init(std::string* error);
  void* MallocAligned(std::size_t size, std::size_t alignment);
  void HandleInvalidFree(const void* p);
  void HandleCorruptCanary(const void* p);

  AllocConfig cfg_;
  std::uint64_t id_;
  std::unique_ptr<PageProvider> provider_;
  Region* data_ = nullptr;
  Region* metadata_ = nullptr;
  std::unique_ptr<MetadataArena> arena_;
  std::span<SizeClass*> classes_;
  LargeAllocator* large_ = nullptr;
  std::atomic<std::size_t> next_arena_{0};
  std::atomic<std::uint64_t> invalid_frees_{0};
  std::atomic<std::uint64_t> canary_reports_{0};
};

}  // namespace hardalloc

#endif  // HARDALLOC_ALLOCATOR_H_
