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

#include "hardalloc/harness/fuzz.h"

#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "hardalloc/harness/executor.h"
#include "hardalloc/harness/trace.h"
#include "hardalloc/lock.h"

namespace hardalloc::harness {

RunReport Fuzz(const AllocConfig& cfg, const FuzzOptions& options) {
  if (options.threads <= 1) {
    ReplayOptions ro;
    ro.check_every = options.check_every;
    ro.backend = options.backend;
    return Replay(RandomTrace(options.seed, options.ops), cfg, ro);
  }

  RunReport report;
  std::string error;
  auto allocator = Allocator::Create(cfg, options.backend, &error);
  if (!allocator) {
    report.counters.violations.push_back("allocator creation failed: " + error);
    return report;
  }
  ResetLockStatistics();

  std::vector<std::unique_ptr<Executor>> execs;
  std::vector<std::vector<TraceOp>> traces;
  for (std::size_t t = 0; t < options.threads; ++t) {
    TraceGenOptions gen;
    gen.thread = static_cast<std::uint32_t>(t);
    traces.push_back(RandomTrace(options.seed + 0x9E3779B97F4A7C15ULL * (t + 1),
                                 options.ops, gen));
    execs.push_back(std::make_unique<Executor>(*allocator));
  }
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < options.threads; ++t) {
    threads.emplace_back([&, t] {
      for (const TraceOp& op : traces[t]) execs[t]->Execute(op);
    });
  }
  for (std::thread& th : threads) th.join();

  std::vector<const std::map<std::uintptr_t, std::uintptr_t>*> sets;
  std::vector<const ShadowModel*> shadows;
  for (const auto& e : execs) {
    report.counters.Merge(e->counters());
    sets.push_back(&e->shadow().intervals());
    shadows.push_back(&e->shadow());
    report.shadow_live += e->shadow().live_count();
  }
  auto& v = report.counters.violations;
  if (auto overlap = FindOverlap(sets)) v.push_back("cross-thread overlap: " + *overlap);
  for (const std::string& e : allocator->Validate()) v.push_back("final sweep: " + e);
  for (const std::string& e : CheckEquivalence(*allocator, shadows))
    v.push_back("final sweep: " + e);
  report.sweeps = 1;
  report.stats = allocator->Stats();
  report.max_locks_held = MaxLocksHeldObserved();
  return report;
}

}  // namespace hardalloc::harness
