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

#include "hardalloc/allocator.h"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "hardalloc/lock.h"

namespace hardalloc {
namespace {

void StderrReportHandler(std::string_view message) {
  std::fprintf(stderr, "hardalloc: %.*s\n", static_cast<int>(message.size()),
               message.data());
}

std::atomic<ReportHandler> report_handler{&StderrReportHandler};
std::atomic<std::uint64_t> next_allocator_id{1};

// Per-thread arena bindings, keyed by allocator id so that several allocator
// instances can coexist in one process.
struct ArenaBinding {
  std::uint64_t allocator_id = 0;
  std::size_t arena = 0;
};
constexpr std::size_t kBindingSlots = 16;
thread_local ArenaBinding arena_bindings[kBindingSlots];

std::string AddressString(const void* p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%p", p);
  return buf;
}

}  // namespace

std::string_view ToString(FreeOutcome outcome) {
  switch (outcome) {
    case FreeOutcome::kNull:
      return "null";
    case FreeOutcome::kFreed:
      return "freed";
    case FreeOutcome::kLargeFreed:
      return "large-freed";
    case FreeOutcome::kInvalid:
      return "invalid";
    case FreeOutcome::kCorruptCanary:
      return "corrupt-canary";
  }
  return "?";
}

void SetReportHandler(ReportHandler handler) {
  report_handler.store(handler != nullptr ? handler : &StderrReportHandler);
}

void QuietReportHandler(std::string_view) {}

std::size_t AllocatorStats::live() const {
  std::size_t n = large_live;
  for (const auto& c : classes) n += c.live;
  return n;
}

std::uint64_t AllocatorStats::corruption_detected() const {
  std::uint64_t n = 0;
  for (const auto& c : classes) n += c.corruption_detected();
  return n;
}

Allocator::Allocator(const AllocConfig& cfg,
                     std::unique_ptr<PageProvider> provider)
    : cfg_(cfg),
      id_(next_allocator_id.fetch_add(1)),
      provider_(std::move(provider)) {}

std::unique_ptr<Allocator> Allocator::Create(const AllocConfig& cfg,
                                             Backend backend,
                                             std::string* error) {
  if (std::string problem = cfg.Validate(); !problem.empty()) {
    if (error != nullptr) *error = problem;
    return nullptr;
  }
  std::unique_ptr<Allocator> a(
      new Allocator(cfg, std::make_unique<PageProvider>(backend)));
  if (!a->Init(error)) return nullptr;
  return a;
}

bool Allocator::Init(std::string* error) {
  auto fail = [&](const char* why) {
    if (error != nullptr) *error = why;
    return false;
  };
  const std::size_t n_classes = cfg_.nb_arenas * cfg_.nb_classes();
  const std::size_t data_bytes = n_classes * cfg_.slabs_per_class * kPageSize;
  data_ = provider_->Reserve(data_bytes, RegionKind::kData);
  if (data_ == nullptr) return fail("cannot reserve the data region");

  std::size_t meta_bytes = MetadataArena::Footprint<SizeClass*>(n_classes) +
                           n_classes * SizeClass::MetadataFootprint(cfg_) +
                           MetadataArena::Footprint<LargeAllocator>(1) +
                           MetadataArena::Footprint<AvlNode>(cfg_.large_map_capacity);
  meta_bytes = (meta_bytes + kPageSize - 1) / kPageSize * kPageSize;
  metadata_ = provider_->Reserve(meta_bytes, RegionKind::kMetadata);
  if (metadata_ == nullptr) return fail("cannot reserve the metadata region");
  arena_ = std::make_unique<MetadataArena>(metadata_);

  classes_ = arena_->AllocateArray<SizeClass*>(n_classes);
  if (classes_.size() != n_classes) return fail("metadata region too small");
  for (std::size_t a = 0; a < cfg_.nb_arenas; ++a) {
    for (std::size_t c = 0; c < cfg_.nb_classes(); ++c) {
      SizeClass* sc = arena_->Create<SizeClass>(cfg_, c, data_,
                                                ClassSpanOffset(a, c), *arena_);
      classes_[a * cfg_.nb_classes() + c] = sc;
      if (sc == nullptr || !sc->ok()) return fail("metadata region too small");
    }
  }
  auto pool = arena_->AllocateArray<AvlNode>(cfg_.large_map_capacity);
  if (pool.size() != cfg_.large_map_capacity) return fail("metadata region too small");
  large_ = arena_->Create<LargeAllocator>(*provider_, pool);
  if (large_ == nullptr) return fail("metadata region too small");
  return true;
}

Allocator::~Allocator() {
  for (SizeClass* sc : classes_) {
    if (sc != nullptr) sc->~SizeClass();
  }
  // Large mappings go away with the provider.
  if (large_ != nullptr) large_->~LargeAllocator();
}

std::size_t Allocator::ClassSpanOffset(std::size_t arena,
                                       std::size_t class_index) const {
  return (arena * cfg_.nb_classes() + class_index) * cfg_.slabs_per_class *
         kPageSize;
}

std::optional<ClassLocation> Allocator::LocateRegular(const void* p) const {
  if (data_ == nullptr || !data_->Contains(p)) return std::nullopt;
  const std::size_t global =
      data_->OffsetOf(p) / (cfg_.slabs_per_class * kPageSize);
  return ClassLocation{global / cfg_.nb_classes(), global % cfg_.nb_classes()};
}

std::size_t Allocator::ArenaOfCurrentThread() {
  ArenaBinding& b = arena_bindings[id_ % kBindingSlots];
  if (b.allocator_id != id_) {
    b.allocator_id = id_;
    b.arena = next_arena_.fetch_add(1, std::memory_order_relaxed) % cfg_.nb_arenas;
  }
  return b.arena;
}

void* Allocator::MallocAligned(std::size_t size, std::size_t alignment) {
  const auto ideal = ClassIndexFor(size, alignment, cfg_);
  if (!ideal) return large_->Malloc(size);
  const std::size_t arena = ArenaOfCurrentThread();
  for (std::size_t c = *ideal; c < cfg_.nb_classes(); ++c) {
    if (!ClassSatisfiesAlignment(cfg_.sc_sizes[c], alignment)) continue;
    SizeClass& sc = size_class(arena, c);
    const SlotAllocation got = WithLock(sc.mutex(), [&] { return sc.MallocLocked(); });
    if (got.status == MallocStatus::kOk) return got.ptr;
    if (got.status == MallocStatus::kCorrupt) return nullptr;
  }
  return nullptr;
}

void* Allocator::Malloc(std::size_t size) {
  return MallocAligned(size, kMinAlignment);
}

void* Allocator::AlignedAlloc(std::size_t alignment, std::size_t size) {
  if (alignment == 0 || !std::has_single_bit(alignment) || alignment > kPageSize)
    return nullptr;
  return MallocAligned(size, std::max(alignment, kMinAlignment));
}

void* Allocator::Calloc(std::size_t n, std::size_t size) {
  std::size_t total = 0;
  if (__builtin_mul_overflow(n, size, &total)) return nullptr;
  // Slots are verified zero and large blocks are fresh mappings.
  return Malloc(total);
}

FreeOutcome Allocator::FreeWithOutcome(void* p) {
  if (p == nullptr) return FreeOutcome::kNull;
  if (const auto loc = LocateRegular(p)) {
    SizeClass& sc = size_class(loc->arena, loc->class_index);
    const std::size_t offset = data_->OffsetOf(p);
    const FreeResult r = WithLock(sc.mutex(), [&] { return sc.FreeLocked(offset); });
    switch (r) {
      case FreeResult::kFreed:
        return FreeOutcome::kFreed;
      case FreeResult::kInvalid:
        HandleInvalidFree(p);
        return FreeOutcome::kInvalid;
      case FreeResult::kCorruptCanary:
        HandleCorruptCanary(p);
        return FreeOutcome::kCorruptCanary;
    }
  }
  if (large_->Free(p)) return FreeOutcome::kLargeFreed;
  HandleInvalidFree(p);
  return FreeOutcome::kInvalid;
}

void Allocator::HandleInvalidFree(const void* p) {
  invalid_frees_.fetch_add(1, std::memory_order_relaxed);
  if (cfg_.invalid_free_policy == InvalidFreePolicy::kIgnore) return;
  report_handler.load()("invalid free of " + AddressString(p));
  if (cfg_.invalid_free_policy == InvalidFreePolicy::kAbort) std::abort();
}

void Allocator::HandleCorruptCanary(const void* p) {
  canary_reports_.fetch_add(1, std::memory_order_relaxed);
  if (cfg_.invalid_free_policy == InvalidFreePolicy::kIgnore) return;
  report_handler.load()("canary overwritten in block " + AddressString(p));
  if (cfg_.invalid_free_policy == InvalidFreePolicy::kAbort) std::abort();
}

void* Allocator::Realloc(void* p, std::size_t new_size) {
  if (p == nullptr) return Malloc(new_size);
  if (new_size == 0) {
    Free(p);
    return nullptr;
  }
  std::size_t old_usable = 0;
  if (const auto loc = LocateRegular(p)) {
    SizeClass& sc = size_class(loc->arena, loc->class_index);
    const std::size_t offset = data_->OffsetOf(p);
    const bool live = WithLock(sc.mutex(), [&] { return sc.IsLiveLocked(offset); });
    if (!live) {
      HandleInvalidFree(p);
      return nullptr;
    }
    if (ClassIndexFor(new_size, kMinAlignment, cfg_) == loc->class_index) return p;
    old_usable = sc.usable_size();
  } else if (const auto size = large_->SizeOf(p)) {
    old_usable = *size;
  } else {
    HandleInvalidFree(p);
    return nullptr;
  }
  void* fresh = Malloc(new_size);
  if (fresh == nullptr) return nullptr;
  std::memcpy(fresh, p, std::min(old_usable, new_size));
  Free(p);
  return fresh;
}

std::size_t Allocator::UsableSize(const void* p) {
  if (p == nullptr) return 0;
  if (const auto loc = LocateRegular(p)) {
    SizeClass& sc = size_class(loc->arena, loc->class_index);
    const std::size_t offset = data_->OffsetOf(p);
    const bool live = WithLock(sc.mutex(), [&] { return sc.IsLiveLocked(offset); });
    return live ? sc.usable_size() : 0;
  }
  return large_->SizeOf(p).value_or(0);
}

std::vector<std::string> Allocator::Validate() {
  std::vector<std::string> errors;
  for (std::size_t a = 0; a < cfg_.nb_arenas; ++a) {
    for (std::size_t c = 0; c < cfg_.nb_classes(); ++c) {
      for (std::string& e : size_class(a, c).Validate())
        errors.push_back("arena " + std::to_string(a) + " " + e);
    }
  }
  for (std::string& e : large_->Validate()) errors.push_back(std::move(e));
  for (const auto& [key, size] : large_->Blocks()) {
    const auto* b = reinterpret_cast<const std::byte*>(key);
    if (data_->Contains(b) || data_->Contains(b + size - 1))
      errors.push_back("large span overlaps the data region");
  }
  return errors;
}

AllocatorStats Allocator::Stats() {
  AllocatorStats s;
  s.classes.reserve(classes_.size());
  for (SizeClass* sc : classes_) s.classes.push_back(sc->Stats());
  s.large_live = large_->count();
  s.invalid_frees = invalid_frees_.load(std::memory_order_relaxed);
  s.canary_reports = canary_reports_.load(std::memory_order_relaxed);
  return s;
}

std::string Allocator::StatsCsv() {
  std::string out = "arena,class,slot_size,live,slabs_used,quarantined,corruption_detected\n";
  const AllocatorStats s = Stats();
  for (std::size_t i = 0; i < s.classes.size(); ++i) {
    const SizeClassStats& c = s.classes[i];
    out += std::to_string(i / cfg_.nb_classes()) + "," +
           std::to_string(i % cfg_.nb_classes()) + "," +
           std::to_string(c.slot_size) + "," + std::to_string(c.live) + "," +
           std::to_string(c.slabs_used) + "," + std::to_string(c.quarantined) +
           "," + std::to_string(c.corruption_detected()) + "\n";
  }
  return out;
}

}  // namespace hardalloc
