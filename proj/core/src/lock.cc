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

#include "hardalloc/lock.h"

#include <atomic>
#include <cassert>

namespace hardalloc {
namespace {

thread_local int held_locks = 0;
std::atomic<int> max_held{0};

}  // namespace

ScopedLock::ScopedLock(std::mutex& mu) : mu_(mu) {
  mu_.lock();
  const int now = ++held_locks;
  assert(now == 1 && "allocator locks must not nest");
  int seen = max_held.load(std::memory_order_relaxed);
  while (now > seen &&
         !max_held.compare_exchange_weak(seen, now, std::memory_order_relaxed)) {
  }
}

ScopedLock::~ScopedLock() {
  --held_locks;
  mu_.unlock();
}

int LocksHeldByThisThread() { return held_locks; }

int MaxLocksHeldObserved() { return max_held.load(std::memory_order_relaxed); }

void ResetLockStatistics() { max_held.store(0, std::memory_order_relaxed); }

}  // namespace hardalloc
