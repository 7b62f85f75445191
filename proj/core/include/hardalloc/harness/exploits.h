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

#ifndef HARDALLOC_HARNESS_EXPLOITS_H_
#define HARDALLOC_HARNESS_EXPLOITS_H_

#include <string>
#include <vector>

#include "hardalloc/config.h"

namespace hardalloc::harness {

struct ScenarioResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExploitReport {
  std::vector<ScenarioResult> scenarios;
  std::vector<ScenarioResult> controls;

  bool ok() const;
};

// Scripted heap attacks against fresh simulated-backend allocators:
// double free, write-after-free, in-slot overflow, cross-slab overflow and
// freed-slab reuse. Canaries, zero checks and guard slabs are forced on and
// the invalid-free policy is forced to Report. Benign control runs must
// report no detections.
//
// Replaces the process report handler with the default one on return.
ExploitReport RunExploitSuite(const AllocConfig& cfg = DefaultConfig());

}  // namespace hardalloc::harness

#endif  // HARDALLOC_HARNESS_EXPLOITS_H_
