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

#ifndef HARDALLOC_LOCK_H_
#define HARDALLOC_LOCK_H_

#include <mutex>

namespace hardalloc {

// Scoped acquisition of an allocator lock. Every allocator lock goes through
// this type so the number of locks a thread holds can be tracked; the
// allocator never holds more than one.
class ScopedLock {
 public:
  explicit ScopedLock(std::mutex& mu);
  ~ScopedLock();
  ScopedLock(const ScopedLock&) = delete;
  ScopedLock& operator=(const ScopedLock&) = delete;

 private:
  std::mutex& mu_;
};

// Allocator locks currently held by the calling thread.
int LocksHeldByThisThread();
// Highest per-thread count observed by any thread since the last reset.
int MaxLocksHeldObserved();
void ResetLockStatistics();

// Runs `f` under `mu`.
template <typename F>
auto WithLock(std::mutex& mu, F&& f) {
  ScopedLock lock(mu);
  return f();
}

}  // namespace hardalloc

#endif  // HARDALLOC_LOCK_H_
