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

#ifndef HARDALLOC_HARNESS_REPLAY_H_
#define HARDALLOC_HARNESS_REPLAY_H_

#include <cstddef>
#include <string>
#include <vector>

#include "hardalloc/allocator.h"
#include "hardalloc/config.h"
#include "hardalloc/harness/executor.h"
#include "hardalloc/harness/shadow.h"
#include "hardalloc/harness/trace.h"
#include "hardalloc/provider.h"

namespace hardalloc::harness {

struct ReplayOptions {
  // Full invariant sweep every this many operations; 0 sweeps only at the end.
  std::size_t check_every = 64;
  Backend backend = Backend::kSim;
};

struct RunReport {
  RunCounters counters;
  std::size_t sweeps = 0;
  std::size_t shadow_live = 0;
  AllocatorStats stats;
  int max_locks_held = 0;

  bool ok() const { return counters.violations.empty(); }
  std::string Summary() const;
};

// Cross-checks allocator statistics against the union of the given shadow
// models: total live count, per-class occupancy and large-block count.
std::vector<std::string> CheckEquivalence(
    Allocator& allocator, const std::vector<const ShadowModel*>& shadows);

// Replays `ops` in order. Operations tagged with thread k > 0 run on a
// dedicated worker thread, one operation at a time, so the allocator sees
// distinct threads while the interleaving stays deterministic.
RunReport Replay(Allocator& allocator, const std::vector<TraceOp>& ops,
                 const ReplayOptions& options = {});
RunReport Replay(const std::vector<TraceOp>& ops, const AllocConfig& cfg,
                 const ReplayOptions& options = {});

}  // namespace hardalloc::harness

#endif  // HARDALLOC_HARNESS_REPLAY_H_
