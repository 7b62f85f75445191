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

#include "hardalloc/harness/exploits.h"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "hardalloc/allocator.h"
#include "hardalloc/harness/replay.h"
#include "hardalloc/harness/trace.h"
#include "hardalloc/lock.h"

namespace hardalloc::harness {
namespace {

struct Probe {
  std::unique_ptr<Allocator> alloc;
  std::string error;
};

Probe Fresh(const AllocConfig& cfg) {
  Probe p;
  p.alloc = Allocator::Create(cfg, Backend::kSim, &p.error);
  return p;
}

struct SlabOf {
  SizeClass* sc;
  std::size_t slab;
  std::size_t page;  // data-region page index
};

SlabOf Where(Allocator& a, const void* p) {
  const auto loc = a.LocateRegular(p);
  SizeClass& sc = a.size_class(loc->arena, loc->class_index);
  const std::size_t off = a.data_region().OffsetOf(p);
  return {&sc, (off - sc.class_base()) / kPageSize, off / kPageSize};
}

std::string Join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : "; ") + s;
  return out;
}

ScenarioResult DoubleFree(const AllocConfig& cfg) {
  ScenarioResult r{"double free", false, ""};
  Probe pr = Fresh(cfg);
  if (!pr.alloc) return r.detail = pr.error, r;
  Allocator& a = *pr.alloc;
  void* p = a.Malloc(32);
  void* keep = a.Malloc(32);
  if (a.FreeWithOutcome(p) != FreeOutcome::kFreed) return r.detail = "first free failed", r;

  const SlabOf s = Where(a, p);
  const SlotBitmap bitmap_before = WithLock(s.sc->mutex(), [&] { return s.sc->bitmap(s.slab); });
  const std::string csv_before = a.StatsCsv();
  const FreeOutcome second = a.FreeWithOutcome(p);
  const SlotBitmap bitmap_after = WithLock(s.sc->mutex(), [&] { return s.sc->bitmap(s.slab); });
  const auto errors = a.Validate();

  r.passed = second == FreeOutcome::kInvalid && a.Stats().invalid_frees == 1 &&
             bitmap_before == bitmap_after && csv_before == a.StatsCsv() && errors.empty();
  r.detail = "second free -> " + std::string(ToString(second)) +
             (bitmap_before == bitmap_after ? ", bitmap unchanged" : ", bitmap changed") +
             (csv_before == a.StatsCsv() ? ", stats unchanged" : ", stats changed");
  if (!errors.empty()) r.detail += ", invariants: " + Join(errors);
  a.Free(keep);
  return r;
}

ScenarioResult WriteAfterFree(const AllocConfig& cfg) {
  ScenarioResult r{"write-after-free", false, ""};
  Probe pr = Fresh(cfg);
  if (!pr.alloc) return r.detail = pr.error, r;
  Allocator& a = *pr.alloc;
  void* p = a.Malloc(48);
  void* keep = a.Malloc(48);  // keeps the slab partial, so p's slot is next
  a.Free(p);
  const std::byte junk{0x41};
  if (a.provider().CheckedWrite(static_cast<std::byte*>(p) + 8, {&junk, 1}))
    return r.detail = "dangling write faulted", r;

  const SlabOf s = Where(a, p);
  std::vector<void*> got;
  bool returned = false;
  bool zeroed = true;
  // Drain the remainder of the slab.
  const std::size_t n = s.sc->slot_count() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    void* q = a.Malloc(48);
    if (q == nullptr) break;
    got.push_back(q);
    returned |= q == p;
    const auto* b = static_cast<const unsigned char*>(q);
    zeroed &= std::all_of(b, b + 48, [](unsigned char c) { return c == 0; });
  }
  const std::uint64_t detected = a.Stats().corruption_detected();
  const auto errors = a.Validate();
  r.passed = !returned && zeroed && detected == 1 && errors.empty();
  r.detail = std::to_string(got.size()) + " allocations after the dangling write, " +
             (returned ? "poisoned slot returned" : "poisoned slot withheld") +
             ", corruption_detected=" + std::to_string(detected);
  if (!errors.empty()) r.detail += ", invariants: " + Join(errors);
  for (void* q : got) a.Free(q);
  a.Free(keep);
  return r;
}

ScenarioResult InSlotOverflow(const AllocConfig& cfg) {
  ScenarioResult r{"1-byte overflow", false, ""};
  Probe pr = Fresh(cfg);
  if (!pr.alloc) return r.detail = pr.error, r;
  Allocator& a = *pr.alloc;
  void* p = a.Malloc(24);
  const std::size_t usable = a.UsableSize(p);
  const std::byte bad{static_cast<unsigned char>((cfg.canary_magic & 0xFF) ^ 0xFF)};
  if (a.provider().CheckedWrite(static_cast<std::byte*>(p) + usable, {&bad, 1}))
    return r.detail = "overflow write faulted", r;
  const FreeOutcome out = a.FreeWithOutcome(p);
  const auto errors = a.Validate();
  r.passed = out == FreeOutcome::kCorruptCanary && a.Stats().canary_reports == 1 &&
             errors.empty();
  r.detail = "byte " + std::to_string(usable) + " overwritten, free -> " +
             std::string(ToString(out));
  if (!errors.empty()) r.detail += ", invariants: " + Join(errors);
  return r;
}

ScenarioResult CrossSlabOverflow(const AllocConfig& cfg) {
  ScenarioResult r{"cross-slab overflow", false, ""};
  Probe pr = Fresh(cfg);
  if (!pr.alloc) return r.detail = pr.error, r;
  Allocator& a = *pr.alloc;
  const std::size_t request = kPageSize - cfg.canary_budget();
  void* p = a.Malloc(request);     // slab 0 of the 4096 class
  void* next = a.Malloc(request);  // extends past the guard slab
  if (p == nullptr || next == nullptr) return r.detail = "allocation failed", r;
  const SlabOf s = Where(a, p);
  const std::vector<std::byte> payload(kPageSize + 1, std::byte{0x41});
  const auto fault = a.provider().CheckedWrite(p, payload);
  const Fault want{a.data_region().id(), s.page + 1, FaultKind::kProtNone};
  const bool guard = s.sc->cells().Status(s.slab + 1) == SlabStatus::kGuard;
  r.passed = s.sc->slot_size() == kPageSize && s.slab == 0 && guard && fault &&
             *fault == want && a.FreeWithOutcome(p) == FreeOutcome::kFreed &&
             a.FreeWithOutcome(next) == FreeOutcome::kFreed;
  r.detail = fault ? "fault at data page " + std::to_string(fault->page) +
                         (fault->kind == FaultKind::kProtNone ? " (prot none)" : " (out of range)")
                   : std::string("no fault");
  return r;
}

ScenarioResult FreedSlabReuse(const AllocConfig& cfg) {
  ScenarioResult r{"freed-slab quarantine", false, ""};
  const std::size_t q = cfg.quarantine_capacity;
  if ((q + 2) * cfg.guard_interval > cfg.slabs_per_class)
    return r.detail = "quarantine capacity does not fit the class span", r;
  Probe pr = Fresh(cfg);
  if (!pr.alloc) return r.detail = pr.error, r;
  Allocator& a = *pr.alloc;
  constexpr std::size_t kSize = 48;  // 64-byte slots

  auto fill_and_free = [&](std::vector<void*>& out) {
    void* first = a.Malloc(kSize);
    if (first == nullptr) return false;
    out.push_back(first);
    const SlabOf s = Where(a, first);
    for (std::size_t i = 1; i < s.sc->slot_count(); ++i) out.push_back(a.Malloc(kSize));
    for (void* x : out) a.Free(x);
    return true;
  };

  std::vector<void*> first_round;
  if (!fill_and_free(first_round)) return r.detail = "allocation failed", r;
  const SlabOf victim = Where(a, first_round.front());
  const bool dropped = !a.data_region().resident(victim.page);
  const bool quarantined =
      victim.sc->cells().Status(victim.slab) == SlabStatus::kQuarantine;

  bool reused_early = false;
  for (std::size_t k = 0; k < q; ++k) {
    std::vector<void*> round;
    if (!fill_and_free(round)) return r.detail = "allocation failed", r;
    for (void* x : round) reused_early |= Where(a, x).page == victim.page;
  }
  void* after = a.Malloc(kSize);
  const bool reused_after = after != nullptr && Where(a, after).page == victim.page;
  const auto errors = a.Validate();
  r.passed = dropped && quarantined && !reused_early && reused_after && errors.empty();
  r.detail = std::string(dropped ? "page released" : "page still resident") +
             (reused_early ? ", reused before dequeue" : ", not reused while quarantined") +
             (reused_after ? ", reused after " : ", not reused after ") +
             std::to_string(q + 1) + " quarantines";
  if (!errors.empty()) r.detail += ", invariants: " + Join(errors);
  a.Free(after);
  return r;
}

ScenarioResult BenignTrace(const AllocConfig& cfg) {
  ScenarioResult r{"control: random trace", false, ""};
  const RunReport rep = Replay(RandomTrace(0xC0FFEE, 20000), cfg, {});
  const std::uint64_t detections = rep.counters.invalid_frees_detected +
                                   rep.counters.canary_detections + rep.counters.faults +
                                   rep.stats.corruption_detected() + rep.stats.invalid_frees +
                                   rep.stats.canary_reports;
  r.passed = rep.ok() && detections == 0;
  r.detail = rep.Summary();
  return r;
}

ScenarioResult BenignBoundaryWrites(const AllocConfig& cfg) {
  ScenarioResult r{"control: full-usable writes", false, ""};
  Probe pr = Fresh(cfg);
  if (!pr.alloc) return r.detail = pr.error, r;
  Allocator& a = *pr.alloc;
  std::size_t freed = 0;
  std::size_t n = 0;
  for (std::size_t size = 0; size <= 2 * kPageSize; size += 7) {
    void* p = a.Malloc(size);
    if (p == nullptr) continue;
    ++n;
    const std::vector<std::byte> fill(a.UsableSize(p), std::byte{0xA5});
    if (a.provider().CheckedWrite(p, fill)) continue;
    const FreeOutcome out = a.FreeWithOutcome(p);
    freed += out == FreeOutcome::kFreed || out == FreeOutcome::kLargeFreed;
  }
  const AllocatorStats st = a.Stats();
  const auto errors = a.Validate();
  r.passed = freed == n && st.corruption_detected() == 0 && st.invalid_frees == 0 &&
             errors.empty();
  r.detail = std::to_string(freed) + "/" + std::to_string(n) + " clean frees";
  return r;
}

}  // namespace

bool ExploitReport::ok() const {
  const auto pass = [](const ScenarioResult& s) { return s.passed; };
  return !scenarios.empty() && std::all_of(scenarios.begin(), scenarios.end(), pass) &&
         std::all_of(controls.begin(), controls.end(), pass);
}

ExploitReport RunExploitSuite(const AllocConfig& base) {
  AllocConfig cfg = base;
  cfg.canary_enabled = true;
  cfg.zero_check_enabled = true;
  cfg.zero_check_policy = ZeroCheckPolicy::kSkipSlot;
  cfg.invalid_free_policy = InvalidFreePolicy::kReport;
  cfg.guard_interval = std::max<std::size_t>(cfg.guard_interval, 2);

  SetReportHandler(&QuietReportHandler);
  ExploitReport report;
  report.scenarios.push_back(DoubleFree(cfg));
  report.scenarios.push_back(WriteAfterFree(cfg));
  report.scenarios.push_back(InSlotOverflow(cfg));
  report.scenarios.push_back(CrossSlabOverflow(cfg));
  report.scenarios.push_back(FreedSlabReuse(cfg));
  report.controls.push_back(BenignTrace(cfg));
  report.controls.push_back(BenignBoundaryWrites(cfg));
  SetReportHandler(nullptr);
  return report;
}

}  // namespace hardalloc::harness
