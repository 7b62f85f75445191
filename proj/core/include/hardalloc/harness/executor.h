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

#ifndef HARDALLOC_HARNESS_EXECUTOR_H_
#define HARDALLOC_HARNESS_EXECUTOR_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "hardalloc/allocator.h"
#include "hardalloc/harness/shadow.h"
#include "hardalloc/harness/trace.h"

namespace hardalloc::harness {

struct RunCounters {
  std::size_t ops = 0;
  std::uint64_t null_results = 0;
  std::uint64_t invalid_frees_detected = 0;
  std::uint64_t canary_detections = 0;
  std::uint64_t faults = 0;
  std::uint64_t skipped = 0;  // stale ids aliasing a live block
  std::vector<std::string> violations;
  std::uint64_t digest = 0xcbf29ce484222325ULL;

  void Merge(const RunCounters& other);
};

// Applies trace operations to an allocator while mirroring them in a shadow
// model. Per-operation postconditions are checked immediately; failures land
// in counters().violations.
//
// Operations on ids that are no longer live are replayed against the id's
// last address, which is how traces express double frees and
// use-after-free accesses.
class Executor {
 public:
  explicit Executor(Allocator& allocator) : allocator_(allocator) {}

  void Execute(const TraceOp& op);

  const ShadowModel& shadow() const { return shadow_; }
  RunCounters& counters() { return counters_; }
  const RunCounters& counters() const { return counters_; }

 private:
  void Violation(const TraceOp& op, const std::string& what);
  void Mix(std::uint64_t v);
  std::uint64_t Normalize(const void* p);
  void AfterAlloc(const TraceOp& op, void* p, std::size_t requested,
                  std::size_t alignment);
  void DoFree(const TraceOp& op);
  void DoRealloc(const TraceOp& op);
  void DoAccess(const TraceOp& op);

  Allocator& allocator_;
  ShadowModel shadow_;
  std::unordered_map<std::uint64_t, std::uintptr_t> retired_;
  RunCounters counters_;
};

}  // namespace hardalloc::harness

#endif  // HARDALLOC_HARNESS_EXECUTOR_H_
