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

#include "hardalloc/harness/executor.h"

#include <algorithm>
#include <bit>

namespace hardalloc::harness {

void RunCounters::Merge(const RunCounters& other) {
  ops += other.ops;
  null_results += other.null_results;
  invalid_frees_detected += other.invalid_frees_detected;
  canary_detections += other.canary_detections;
  faults += other.faults;
  skipped += other.skipped;
  violations.insert(violations.end(), other.violations.begin(),
                    other.violations.end());
  digest = (digest ^ other.digest) * 0x100000001b3ULL;
}

void Executor::Violation(const TraceOp& op, const std::string& what) {
  counters_.violations.push_back("op " + std::to_string(counters_.ops) + " (" +
                                 FormatOp(op) + "): " + what);
}

void Executor::Mix(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    counters_.digest ^= (v >> (8 * i)) & 0xFFu;
    counters_.digest *= 0x100000001b3ULL;
  }
}

// Stable across runs: data-region offsets for slots, size for large blocks.
std::uint64_t Executor::Normalize(const void* p) {
  if (p == nullptr) return 0;
  Region& data = allocator_.data_region();
  if (data.Contains(p)) return data.OffsetOf(p) + 1;
  return (std::uint64_t{1} << 62) | allocator_.UsableSize(p);
}

void Executor::AfterAlloc(const TraceOp& op, void* p, std::size_t requested,
                          std::size_t alignment) {
  Mix(Normalize(p));
  if (p == nullptr) {
    ++counters_.null_results;
    return;
  }
  retired_.erase(op.id);
  const std::size_t usable = allocator_.UsableSize(p);
  for (const std::string& e : shadow_.OnAlloc(op.id, p, requested, usable, alignment))
    Violation(op, e);
}

void Executor::Execute(const TraceOp& op) {
  Mix(static_cast<std::uint64_t>(op.kind));
  switch (op.kind) {
    case OpKind::kAlloc:
    case OpKind::kCalloc:
    case OpKind::kAlignedAlloc: {
      if (shadow_.Find(op.id) != nullptr) {
        Violation(op, "trace reuses a live id");
        break;
      }
      void* p = nullptr;
      std::size_t requested = op.size;
      std::size_t alignment = 16;
      bool expect_null = false;
      if (op.kind == OpKind::kAlloc) {
        p = allocator_.Malloc(op.size);
      } else if (op.kind == OpKind::kCalloc) {
        expect_null = __builtin_mul_overflow(op.count, op.size, &requested);
        p = allocator_.Calloc(op.count, op.size);
      } else {
        expect_null = op.alignment == 0 || !std::has_single_bit(op.alignment) ||
                      op.alignment > kPageSize;
        alignment = std::max<std::size_t>(op.alignment, 16);
        p = allocator_.AlignedAlloc(op.alignment, op.size);
      }
      if (expect_null) {
        if (p != nullptr) Violation(op, "expected null for an invalid request");
        Mix(Normalize(p));
        ++counters_.null_results;
        break;
      }
      AfterAlloc(op, p, requested, alignment);
      break;
    }
    case OpKind::kFree:
      DoFree(op);
      break;
    case OpKind::kRealloc:
      DoRealloc(op);
      break;
    case OpKind::kWrite:
    case OpKind::kRead:
      DoAccess(op);
      break;
  }
  ++counters_.ops;
}

void Executor::DoFree(const TraceOp& op) {
  if (const ShadowBlock* b = shadow_.Find(op.id)) {
    void* p = reinterpret_cast<void*>(b->addr);
    const FreeOutcome outcome = allocator_.FreeWithOutcome(p);
    Mix(static_cast<std::uint64_t>(outcome));
    shadow_.OnFree(op.id);
    retired_[op.id] = reinterpret_cast<std::uintptr_t>(p);
    if (outcome == FreeOutcome::kInvalid) Violation(op, "free of a live block rejected");
    if (outcome == FreeOutcome::kCorruptCanary) ++counters_.canary_detections;
    return;
  }
  const auto it = retired_.find(op.id);
  if (it == retired_.end()) return;  // never allocated (e.g. a null result)
  if (shadow_.Owner(it->second)) {
    ++counters_.skipped;
    return;
  }
  const FreeOutcome outcome =
      allocator_.FreeWithOutcome(reinterpret_cast<void*>(it->second));
  Mix(static_cast<std::uint64_t>(outcome));
  if (outcome == FreeOutcome::kInvalid) {
    ++counters_.invalid_frees_detected;
  } else {
    Violation(op, "double free accepted");
  }
}

void Executor::DoRealloc(const TraceOp& op) {
  const ShadowBlock* b = shadow_.Find(op.id);
  if (b == nullptr) {
    if (retired_.count(op.id) == 0)
      AfterAlloc(op, allocator_.Realloc(nullptr, op.size), op.size, 16);
    return;
  }
  void* old = reinterpret_cast<void*>(b->addr);
  const std::size_t old_usable = b->usable;
  void* p = allocator_.Realloc(old, op.size);
  Mix(Normalize(p));
  if (op.size == 0) {
    shadow_.OnFree(op.id);
    retired_[op.id] = reinterpret_cast<std::uintptr_t>(old);
    return;
  }
  if (p == nullptr) {
    ++counters_.null_results;
    return;
  }
  const std::size_t preserved = p == old ? old_usable : std::min(old_usable, op.size);
  if (p != old) retired_.erase(op.id);
  for (const std::string& e : shadow_.OnRealloc(op.id, p, op.size,
                                                allocator_.UsableSize(p), preserved))
    Violation(op, e);
}

void Executor::DoAccess(const TraceOp& op) {
  PageProvider& provider = allocator_.provider();
  std::uintptr_t base = 0;
  const ShadowBlock* b = shadow_.Find(op.id);
  if (b != nullptr) {
    base = b->addr;
  } else if (const auto it = retired_.find(op.id); it != retired_.end()) {
    base = it->second;
    if (const auto owner = shadow_.Owner(base + op.offset)) {
      ++counters_.skipped;
      return;
    }
  } else {
    return;
  }
  auto* addr = reinterpret_cast<std::byte*>(base + op.offset);
  if (op.kind == OpKind::kWrite) {
    const std::byte value{op.byte};
    const auto fault = provider.CheckedWrite(addr, {&value, 1});
    Mix(fault ? 1 : 0);
    if (fault) {
      ++counters_.faults;
      if (b != nullptr && op.offset < b->usable) Violation(op, "fault inside a live block");
      return;
    }
    if (b != nullptr && op.offset < b->usable) shadow_.OnWrite(op.id, op.offset, op.byte);
    return;
  }
  std::byte value{0};
  const auto fault = provider.CheckedRead(addr, {&value, 1});
  Mix(fault ? 1 : std::to_integer<std::uint64_t>(value) + 2);
  if (fault) {
    ++counters_.faults;
    if (b != nullptr && op.offset < b->usable) Violation(op, "fault inside a live block");
    return;
  }
  if (b != nullptr && op.offset < b->usable) {
    const std::uint8_t want = shadow_.Expected(op.id, op.offset);
    if (std::to_integer<std::uint8_t>(value) != want)
      Violation(op, "read " + std::to_string(std::to_integer<int>(value)) +
                        ", expected " + std::to_string(want));
  }
}

}  // namespace hardalloc::harness
