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

// Allocation traces.
//
// Text format, one operation per line, '#' starts a comment:
//
//   [t<k>] a  <id> <size>            malloc
//   [t<k>] f  <id>                   free
//   [t<k>] ra <id> <size>            realloc
//   [t<k>] ca <id> <n> <size>        calloc
//   [t<k>] ma <id> <align> <size>    aligned_alloc
//   [t<k>] w  <id> <off> <hexbyte>   store one byte
//   [t<k>] r  <id> <off>             load one byte and compare to the model
//
// The thread tag defaults to t0. Ids are client handles; a well-formed trace
// only frees, reallocates or accesses live ids.

#ifndef HARDALLOC_HARNESS_TRACE_H_
#define HARDALLOC_HARNESS_TRACE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hardalloc::harness {

enum class OpKind { kAlloc, kFree, kRealloc, kCalloc, kAlignedAlloc, kWrite, kRead };

struct TraceOp {
  unsigned thread = 0;
  OpKind kind = OpKind::kAlloc;
  std::uint64_t id = 0;
  std::size_t size = 0;       // a, ra, ca (element size), ma
  std::size_t count = 0;      // ca
  std::size_t alignment = 0;  // ma
  std::size_t offset = 0;     // w, r
  std::uint8_t byte = 0;      // w

  friend bool operator==(const TraceOp&, const TraceOp&) = default;
};

struct ParseError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct ParsedTrace {
  std::vector<TraceOp> ops;
  std::optional<ParseError> error;
};

ParsedTrace ParseTrace(std::string_view text);
std::string FormatOp(const TraceOp& op);
std::string FormatTrace(const std::vector<TraceOp>& ops);

struct TraceGenOptions {
  std::size_t max_live = 512;
  std::size_t max_small = 4096;
  std::size_t max_large = 16384;
  // Percent of allocations that go to the large path.
  unsigned large_percent = 3;
  unsigned thread = 0;
};

// Well-formed random trace: no double frees, accesses stay within the
// requested size. Identical (seed, n_ops, options) give identical traces.
std::vector<TraceOp> RandomTrace(std::uint64_t seed, std::size_t n_ops,
                                 const TraceGenOptions& options = {});

}  // namespace hardalloc::harness

#endif  // HARDALLOC_HARNESS_TRACE_H_
