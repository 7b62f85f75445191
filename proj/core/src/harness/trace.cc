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

#include "hardalloc/harness/trace.h"

#include <charconv>
#include <cstdio>
#include <random>
#include <sstream>
#include <unordered_map>

namespace hardalloc::harness {
namespace {

std::vector<std::string_view> Tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool ParseNumber(std::string_view s, T& out, int base = 10) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out, base);
  return ec == std::errc() && ptr == s.data() + s.size();
}

struct OpShape {
  std::string_view mnemonic;
  OpKind kind;
  std::size_t operands;  // after the id
};

constexpr OpShape kShapes[] = {
    {"a", OpKind::kAlloc, 1},        {"f", OpKind::kFree, 0},
    {"ra", OpKind::kRealloc, 1},     {"ca", OpKind::kCalloc, 2},
    {"ma", OpKind::kAlignedAlloc, 2}, {"w", OpKind::kWrite, 2},
    {"r", OpKind::kRead, 1},
};

}  // namespace

ParsedTrace ParseTrace(std::string_view text) {
  ParsedTrace result;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto fail = [&](std::string message) {
    result.error = ParseError{line_no, std::move(message)};
    return result;
  };
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    auto tokens = Tokens(line);
    if (tokens.empty()) {
      if (end == text.size()) break;
      continue;
    }

    TraceOp op;
    std::size_t t = 0;
    if (tokens[0].size() > 1 && tokens[0][0] == 't' &&
        ParseNumber(tokens[0].substr(1), op.thread)) {
      t = 1;
    }
    if (t >= tokens.size()) return fail("missing operation");
    const OpShape* shape = nullptr;
    for (const OpShape& s : kShapes) {
      if (s.mnemonic == tokens[t]) shape = &s;
    }
    if (shape == nullptr)
      return fail("unknown operation '" + std::string(tokens[t]) + "'");
    if (tokens.size() - t - 1 != shape->operands + 1)
      return fail("'" + std::string(shape->mnemonic) + "' expects " +
                  std::to_string(shape->operands + 1) + " operands");
    op.kind = shape->kind;
    if (!ParseNumber(tokens[t + 1], op.id)) return fail("bad id");
    const auto arg = [&](std::size_t k) { return tokens[t + 2 + k]; };
    bool ok = true;
    switch (op.kind) {
      case OpKind::kAlloc:
      case OpKind::kRealloc:
        ok = ParseNumber(arg(0), op.size);
        break;
      case OpKind::kFree:
        break;
      case OpKind::kCalloc:
        ok = ParseNumber(arg(0), op.count) && ParseNumber(arg(1), op.size);
        break;
      case OpKind::kAlignedAlloc:
        ok = ParseNumber(arg(0), op.alignment) && ParseNumber(arg(1), op.size);
        break;
      case OpKind::kWrite: {
        std::string_view hex = arg(1);
        if (hex.size() > 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X'))
          hex = hex.substr(2);
        unsigned value = 0;
        ok = ParseNumber(arg(0), op.offset) && ParseNumber(hex, value, 16) && value <= 0xFF;
        op.byte = static_cast<std::uint8_t>(value);
        break;
      }
      case OpKind::kRead:
        ok = ParseNumber(arg(0), op.offset);
        break;
    }
    if (!ok) return fail("malformed operand");
    result.ops.push_back(op);
    if (end == text.size()) break;
  }
  return result;
}

std::string FormatOp(const TraceOp& op) {
  std::ostringstream out;
  out << 't' << op.thread << ' ';
  switch (op.kind) {
    case OpKind::kAlloc:
      out << "a " << op.id << ' ' << op.size;
      break;
    case OpKind::kFree:
      out << "f " << op.id;
      break;
    case OpKind::kRealloc:
      out << "ra " << op.id << ' ' << op.size;
      break;
    case OpKind::kCalloc:
      out << "ca " << op.id << ' ' << op.count << ' ' << op.size;
      break;
    case OpKind::kAlignedAlloc:
      out << "ma " << op.id << ' ' << op.alignment << ' ' << op.size;
      break;
    case OpKind::kWrite: {
      char hex[3];
      std::snprintf(hex, sizeof(hex), "%02x", op.byte);
      out << "w " << op.id << ' ' << op.offset << ' ' << hex;
      break;
    }
    case OpKind::kRead:
      out << "r " << op.id << ' ' << op.offset;
      break;
  }
  return out.str();
}

std::string FormatTrace(const std::vector<TraceOp>& ops) {
  std::string out;
  for (const TraceOp& op : ops) {
    out += FormatOp(op);
    out += '\n';
  }
  return out;
}

std::vector<TraceOp> RandomTrace(std::uint64_t seed, std::size_t n_ops,
                                 const TraceGenOptions& options) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::vector<TraceOp> ops;
  ops.reserve(n_ops);
  // Live ids and their requested sizes, in a vector for O(1) random pick.
  std::vector<std::pair<std::uint64_t, std::size_t>> live;
  std::uint64_t next_id = 1;

  auto pick_size = [&] {
    if (uniform(0, 99) < options.large_percent)
      return uniform(options.max_small + 1, options.max_large);
    if (uniform(0, 9) < 7) return uniform(0, 512);
    return uniform(0, options.max_small);
  };

  while (ops.size() < n_ops) {
    TraceOp op;
    op.thread = options.thread;
    const std::size_t roll = uniform(0, 99);
    const bool must_free = live.size() >= options.max_live;
    if (!live.empty() && (must_free || roll < 25)) {
      const std::size_t k = uniform(0, live.size() - 1);
      op.kind = OpKind::kFree;
      op.id = live[k].first;
      live[k] = live.back();
      live.pop_back();
    } else if (!live.empty() && roll < 33) {
      const std::size_t k = uniform(0, live.size() - 1);
      op.kind = OpKind::kRealloc;
      op.id = live[k].first;
      op.size = pick_size();
      if (op.size == 0) op.size = 1;  // realloc(p, 0) frees
      live[k].second = op.size;
    } else if (!live.empty() && roll < 43) {
      const std::size_t k = uniform(0, live.size() - 1);
      if (live[k].second == 0) continue;
      op.kind = OpKind::kWrite;
      op.id = live[k].first;
      op.offset = uniform(0, live[k].second - 1);
      op.byte = static_cast<std::uint8_t>(uniform(1, 255));
    } else if (!live.empty() && roll < 50) {
      const std::size_t k = uniform(0, live.size() - 1);
      if (live[k].second == 0) continue;
      op.kind = OpKind::kRead;
      op.id = live[k].first;
      op.offset = uniform(0, live[k].second - 1);
    } else {
      op.id = next_id++;
      const std::size_t flavor = uniform(0, 19);
      if (flavor == 0) {
        op.kind = OpKind::kCalloc;
        op.count = uniform(0, 16);
        op.size = uniform(0, 64);
      } else if (flavor == 1) {
        op.kind = OpKind::kAlignedAlloc;
        op.alignment = std::size_t{16} << uniform(0, 8);
        op.size = pick_size();
      } else {
        op.kind = OpKind::kAlloc;
        op.size = pick_size();
      }
      const std::size_t requested =
          op.kind == OpKind::kCalloc ? op.count * op.size : op.size;
      live.emplace_back(op.id, requested);
    }
    ops.push_back(op);
  }
  return ops;
}

}  // namespace hardalloc::harness
