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

#include "hardalloc/config.h"

#include <bit>
#include <charconv>
#include <cstdlib>

namespace hardalloc {

std::string_view ToString(InvalidFreePolicy policy) {
  switch (policy) {
    case InvalidFreePolicy::kIgnore:
      return "ignore";
    case InvalidFreePolicy::kReport:
      return "report";
    case InvalidFreePolicy::kAbort:
      return "abort";
  }
  return "?";
}

std::optional<InvalidFreePolicy> ParseInvalidFreePolicy(std::string_view text) {
  if (text == "ignore") return InvalidFreePolicy::kIgnore;
  if (text == "report") return InvalidFreePolicy::kReport;
  if (text == "abort") return InvalidFreePolicy::kAbort;
  return std::nullopt;
}

AllocConfig DefaultConfig() {
  AllocConfig cfg;
  for (std::size_t s = 16; s <= 128; s += 16) cfg.sc_sizes.push_back(s);
  // Four subdivisions per doubling from 128 up to the page size.
  for (std::size_t base = 128; base < kPageSize; base *= 2) {
    const std::size_t step = base / 4;
    for (std::size_t k = 1; k <= 4; ++k) cfg.sc_sizes.push_back(base + k * step);
  }
  return cfg;
}

std::string AllocConfig::Validate() const {
  if (page_size != kPageSize) return "page_size must be 4096";
  if (sc_sizes.empty()) return "sc_sizes is empty";
  for (std::size_t i = 0; i < sc_sizes.size(); ++i) {
    const std::size_t s = sc_sizes[i];
    if (s == 0 || s % kMinAlignment != 0)
      return "size class " + std::to_string(s) + " is not a positive multiple of 16";
    if (s > page_size)
      return "size class " + std::to_string(s) + " exceeds the page size";
    if (i > 0 && s <= sc_sizes[i - 1]) return "sc_sizes must be strictly increasing";
  }
  if (nb_arenas == 0) return "nb_arenas must be at least 1";
  if (slabs_per_class == 0) return "slabs_per_class must be at least 1";
  if (canary_enabled && (canary_size == 0 || canary_size > sizeof(canary_magic)))
    return "canary_size must be in [1, 8]";
  if (canary_enabled && canary_size >= sc_sizes.front())
    return "canary_size must be smaller than the smallest class";
  if (large_map_capacity == 0) return "large_map_capacity must be at least 1";
  return {};
}

bool ClassSatisfiesAlignment(std::size_t class_size, std::size_t alignment) {
  if (alignment <= kMinAlignment) return true;
  return std::has_single_bit(class_size) && class_size >= alignment;
}

std::optional<std::size_t> ClassIndexFor(std::size_t request,
                                         std::size_t alignment,
                                         const AllocConfig& cfg) {
  const std::size_t budget = cfg.canary_budget();
  if (request > cfg.page_size - budget) return std::nullopt;
  const std::size_t need = request + budget;
  for (std::size_t i = 0; i < cfg.sc_sizes.size(); ++i) {
    const std::size_t s = cfg.sc_sizes[i];
    if (s >= need && ClassSatisfiesAlignment(s, alignment)) return i;
  }
  return std::nullopt;
}

std::size_t UsableSizeOfClass(std::size_t class_index, const AllocConfig& cfg) {
  return cfg.sc_sizes[class_index] - cfg.canary_budget();
}

namespace {

bool ParseCount(const char* text, std::size_t& out) {
  const std::string_view sv(text);
  const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), out);
  return ec == std::errc() && ptr == sv.data() + sv.size();
}

bool Truthy(const char* text) {
  const std::string_view sv(text);
  return !(sv.empty() || sv == "0" || sv == "false" || sv == "no");
}

}  // namespace

std::string ApplyEnvironmentOverrides(
    AllocConfig& cfg,
    const std::function<const char*(const char*)>& lookup) {
  struct CountVar {
    const char* name;
    std::size_t* field;
  };
  const CountVar counts[] = {
      {"HARDALLOC_ARENAS", &cfg.nb_arenas},
      {"HARDALLOC_GUARD_INTERVAL", &cfg.guard_interval},
      {"HARDALLOC_QUARANTINE", &cfg.quarantine_capacity},
  };
  for (const auto& var : counts) {
    if (const char* v = lookup(var.name)) {
      if (!ParseCount(v, *var.field))
        return std::string(var.name) + ": expected a non-negative integer, got '" + v + "'";
    }
  }
  if (const char* v = lookup("HARDALLOC_NO_CANARY"); v && Truthy(v))
    cfg.canary_enabled = false;
  if (const char* v = lookup("HARDALLOC_NO_ZERO_CHECK"); v && Truthy(v))
    cfg.zero_check_enabled = false;
  if (const char* v = lookup("HARDALLOC_INVALID_FREE")) {
    const auto policy = ParseInvalidFreePolicy(v);
    if (!policy)
      return std::string("HARDALLOC_INVALID_FREE: expected ignore|report|abort, got '") + v + "'";
    cfg.invalid_free_policy = *policy;
  }
  return cfg.Validate();
}

std::string ApplyEnvironmentOverrides(AllocConfig& cfg) {
  return ApplyEnvironmentOverrides(cfg, [](const char* name) { return std::getenv(name); });
}

}  // namespace hardalloc
