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

#ifndef HARDALLOC_HARNESS_FUZZ_H_
#define HARDALLOC_HARNESS_FUZZ_H_

#include <cstddef>
#include <cstdint>

#include "hardalloc/config.h"
#include "hardalloc/harness/replay.h"
#include "hardalloc/provider.h"

namespace hardalloc::harness {

struct FuzzOptions {
  std::uint64_t seed = 1;
  std::size_t ops = 100000;  // per thread
  std::size_t threads = 1;
  std::size_t check_every = 64;  // single-threaded runs only
  Backend backend = Backend::kSim;
};

// One thread: a seeded random trace replayed with periodic sweeps, fully
// deterministic. Several threads: each runs its own seeded trace
// concurrently against one allocator; disjointness, invariants and
// occupancy are checked after the join.
RunReport Fuzz(const AllocConfig& cfg, const FuzzOptions& options);

}  // namespace hardalloc::harness

#endif  // HARDALLOC_HARNESS_FUZZ_H_
