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

#include "hardalloc/harness/replay.h"

#include <condition_variable>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "hardalloc/lock.h"

namespace hardalloc::harness {
namespace {

class Worker {
 public:
  Worker() : thread_([this] { Loop(); }) {}
  ~Worker() {
    {
      std::lock_guard<std::mutex> l(mu_);
      quit_ = true;
    }
    cv_.notify_all();
    thread_.join();
  }

  // Runs `job` on the worker and waits for it to finish.
  void Run(std::function<void()> job) {
    std::unique_lock<std::mutex> l(mu_);
    job_ = std::move(job);
    cv_.notify_all();
    cv_.wait(l, [this] { return !job_; });
  }

 private:
  void Loop() {
    std::unique_lock<std::mutex> l(mu_);
    for (;;) {
      cv_.wait(l, [this] { return quit_ || job_; });
      if (job_) {
        job_();
        job_ = nullptr;
        cv_.notify_all();
        continue;
      }
      if (quit_) return;
    }
  }

  std::mutex mu_;
  std::condition_variable cv_;
  std::function<void()> job_;
  bool quit_ = false;
  std::thread thread_;
};

void Sweep(Allocator& allocator, const ShadowModel& shadow, std::size_t at,
           RunReport& report) {
  ++report.sweeps;
  auto& v = report.counters.violations;
  for (const std::string& e : allocator.Validate())
    v.push_back("sweep after op " + std::to_string(at) + ": " + e);
  for (const std::string& e : CheckEquivalence(allocator, {&shadow}))
    v.push_back("sweep after op " + std::to_string(at) + ": " + e);
}

}  // namespace

std::string RunReport::Summary() const {
  char digest[24];
  std::snprintf(digest, sizeof(digest), "%016llx",
                static_cast<unsigned long long>(counters.digest));
  std::string out = "ops=" + std::to_string(counters.ops) +
                    " violations=" + std::to_string(counters.violations.size()) +
                    " invalid_frees=" + std::to_string(counters.invalid_frees_detected) +
                    " canary=" + std::to_string(counters.canary_detections) +
                    " faults=" + std::to_string(counters.faults) +
                    " nulls=" + std::to_string(counters.null_results) +
                    " live=" + std::to_string(shadow_live) +
                    " sweeps=" + std::to_string(sweeps) +
                    " corruption=" + std::to_string(stats.corruption_detected()) +
                    " digest=" + digest;
  return out;
}

std::vector<std::string> CheckEquivalence(
    Allocator& allocator, const std::vector<const ShadowModel*>& shadows) {
  std::vector<std::string> errors;
  const AllocatorStats stats = allocator.Stats();
  const std::size_t nc = allocator.config().nb_classes();
  std::vector<std::size_t> per_class(stats.classes.size(), 0);
  std::size_t total = 0;
  std::size_t large = 0;
  for (const ShadowModel* s : shadows) {
    for (const auto& [id, b] : s->blocks()) {
      ++total;
      const auto loc = allocator.LocateRegular(reinterpret_cast<const void*>(b.addr));
      if (loc) {
        ++per_class[loc->arena * nc + loc->class_index];
      } else {
        ++large;
      }
    }
  }
  if (total != stats.live())
    errors.push_back("shadow holds " + std::to_string(total) +
                     " live blocks, allocator reports " + std::to_string(stats.live()));
  if (large != stats.large_live)
    errors.push_back("shadow holds " + std::to_string(large) +
                     " large blocks, allocator reports " +
                     std::to_string(stats.large_live));
  for (std::size_t i = 0; i < per_class.size(); ++i) {
    if (per_class[i] != stats.classes[i].live)
      errors.push_back("arena " + std::to_string(i / nc) + " class " +
                       std::to_string(i % nc) + ": shadow " +
                       std::to_string(per_class[i]) + " live, allocator " +
                       std::to_string(stats.classes[i].live));
  }
  return errors;
}

RunReport Replay(Allocator& allocator, const std::vector<TraceOp>& ops,
                 const ReplayOptions& options) {
  RunReport report;
  ResetLockStatistics();
  Executor exec(allocator);
  std::map<std::uint32_t, std::unique_ptr<Worker>> workers;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const TraceOp& op = ops[i];
    if (op.thread == 0) {
      exec.Execute(op);
    } else {
      auto& w = workers[op.thread];
      if (!w) w = std::make_unique<Worker>();
      w->Run([&] { exec.Execute(op); });
    }
    if (options.check_every != 0 && (i + 1) % options.check_every == 0)
      Sweep(allocator, exec.shadow(), i + 1, report);
  }
  Sweep(allocator, exec.shadow(), ops.size(), report);
  workers.clear();

  const auto sweep_violations = std::move(report.counters.violations);
  report.counters = exec.counters();
  report.counters.violations.insert(report.counters.violations.end(),
                                    sweep_violations.begin(), sweep_violations.end());
  report.shadow_live = exec.shadow().live_count();
  report.stats = allocator.Stats();
  report.max_locks_held = MaxLocksHeldObserved();
  return report;
}

RunReport Replay(const std::vector<TraceOp>& ops, const AllocConfig& cfg,
                 const ReplayOptions& options) {
  std::string error;
  auto allocator = Allocator::Create(cfg, options.backend, &error);
  if (!allocator) {
    RunReport report;
    report.counters.violations.push_back("allocator creation failed: " + error);
    return report;
  }
  return Replay(*allocator, ops, options);
}

}  // namespace hardalloc::harness
