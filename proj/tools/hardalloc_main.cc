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

// hardalloc: command-line driver for trace replay, fuzzing, the exploit
// suite and benchmark workloads.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hardalloc/allocator.h"
#include "hardalloc/bench/workload.h"
#include "hardalloc/config.h"
#include "hardalloc/harness/exploits.h"
#include "hardalloc/harness/fuzz.h"
#include "hardalloc/harness/replay.h"
#include "hardalloc/harness/trace.h"

namespace {

using hardalloc::AllocConfig;
using hardalloc::Backend;

constexpr int kMaxViolationsShown = 20;

struct ConfigFlags {
  std::optional<std::size_t> arenas;
  std::optional<std::size_t> guard_interval;
  std::optional<std::size_t> quarantine;
  bool no_canary = false;
  bool no_zero_check = false;
  std::optional<std::string> invalid_free;
  std::string provider = "sim";

  void AddTo(CLI::App* app) {
    app->add_option("--arenas", arenas, "Number of arenas");
    app->add_option("--guard-interval", guard_interval,
                    "Every Nth slab is a guard slab (0 disables)");
    app->add_option("--quarantine", quarantine, "Quarantine capacity in slabs");
    app->add_flag("--no-canary", no_canary, "Disable slot canaries");
    app->add_flag("--no-zero-check", no_zero_check, "Disable zero check on allocation");
    app->add_option("--invalid-free", invalid_free, "ignore|report|abort");
    app->add_option("--provider", provider, "Page provider backend")
        ->check(CLI::IsMember({"sim", "os"}));
  }

  // Defaults, then environment, then flags.
  bool Resolve(AllocConfig& cfg, Backend& backend) const {
    cfg = hardalloc::DefaultConfig();
    if (std::string err = hardalloc::ApplyEnvironmentOverrides(cfg); !err.empty()) {
      std::cerr << "hardalloc: " << err << "\n";
      return false;
    }
    if (arenas) cfg.nb_arenas = *arenas;
    if (guard_interval) cfg.guard_interval = *guard_interval;
    if (quarantine) cfg.quarantine_capacity = *quarantine;
    if (no_canary) cfg.canary_enabled = false;
    if (no_zero_check) cfg.zero_check_enabled = false;
    if (invalid_free) {
      const auto policy = hardalloc::ParseInvalidFreePolicy(*invalid_free);
      if (!policy) {
        std::cerr << "hardalloc: bad --invalid-free '" << *invalid_free << "'\n";
        return false;
      }
      cfg.invalid_free_policy = *policy;
    }
    if (std::string err = cfg.Validate(); !err.empty()) {
      std::cerr << "hardalloc: " << err << "\n";
      return false;
    }
    backend = *hardalloc::ParseBackend(provider);
    return true;
  }
};

int PrintRun(const hardalloc::harness::RunReport& report) {
  std::cout << report.Summary() << "\n";
  int shown = 0;
  for (const std::string& v : report.counters.violations) {
    if (shown++ == kMaxViolationsShown) {
      std::cout << "  ... " << report.counters.violations.size() - kMaxViolationsShown
                << " more\n";
      break;
    }
    std::cout << "  violation: " << v << "\n";
  }
  return report.ok() ? 0 : 1;
}

std::optional<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<std::vector<hardalloc::harness::TraceOp>> LoadTrace(const std::string& path) {
  const auto text = ReadFile(path);
  if (!text) {
    std::cerr << "hardalloc: cannot read " << path << "\n";
    return std::nullopt;
  }
  auto parsed = hardalloc::harness::ParseTrace(*text);
  if (parsed.error) {
    std::cerr << path << ":" << parsed.error->line << ": " << parsed.error->message << "\n";
    return std::nullopt;
  }
  return std::move(parsed.ops);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardened slab allocator: replay, fuzz, exploit suite and benchmarks"};
  app.require_subcommand(1);
  int rc = 0;

  // replay
  ConfigFlags replay_flags;
  std::string trace_path;
  std::size_t check_every = 64;
  auto* replay = app.add_subcommand("replay", "Replay a trace file against the shadow oracle");
  replay->add_option("--trace", trace_path, "Trace file")->required();
  replay->add_option("--check-every", check_every, "Invariant sweep interval (0: end only)");
  replay_flags.AddTo(replay);
  replay->callback([&] {
    AllocConfig cfg;
    hardalloc::harness::ReplayOptions opts;
    if (!replay_flags.Resolve(cfg, opts.backend)) {
      rc = 2;
      return;
    }
    const auto ops = LoadTrace(trace_path);
    if (!ops) {
      rc = 2;
      return;
    }
    opts.check_every = check_every;
    rc = PrintRun(hardalloc::harness::Replay(*ops, cfg, opts));
  });

  // fuzz
  ConfigFlags fuzz_flags;
  hardalloc::harness::FuzzOptions fuzz_opts;
  auto* fuzz = app.add_subcommand("fuzz", "Random differential fuzzing");
  fuzz->add_option("--seed", fuzz_opts.seed, "RNG seed");
  fuzz->add_option("--ops", fuzz_opts.ops, "Operations per thread");
  fuzz->add_option("--threads", fuzz_opts.threads, "Concurrent op streams")
      ->check(CLI::PositiveNumber);
  fuzz->add_option("--check-every", fuzz_opts.check_every,
                   "Invariant sweep interval, single-threaded runs");
  fuzz_flags.AddTo(fuzz);
  fuzz->callback([&] {
    AllocConfig cfg;
    if (!fuzz_flags.Resolve(cfg, fuzz_opts.backend)) {
      rc = 2;
      return;
    }
    const auto report = hardalloc::harness::Fuzz(cfg, fuzz_opts);
    rc = PrintRun(report);
    std::cout << "max_locks_held=" << report.max_locks_held << "\n";
  });

  // exploits
  ConfigFlags exploit_flags;
  auto* exploits = app.add_subcommand("exploits", "Run the scripted attack suite");
  exploit_flags.AddTo(exploits);
  exploits->callback([&] {
    AllocConfig cfg;
    Backend backend;
    if (!exploit_flags.Resolve(cfg, backend)) {
      rc = 2;
      return;
    }
    const auto report = hardalloc::harness::RunExploitSuite(cfg);
    for (const auto* group : {&report.scenarios, &report.controls}) {
      for (const auto& s : *group)
        std::cout << (s.passed ? "PASS " : "FAIL ") << s.name << ": " << s.detail << "\n";
    }
    rc = report.ok() ? 0 : 1;
  });

  // stats
  ConfigFlags stats_flags;
  std::string stats_trace;
  auto* stats = app.add_subcommand("stats", "Per-class statistics CSV, optionally after a trace");
  stats->add_option("--trace", stats_trace, "Trace to replay first");
  stats_flags.AddTo(stats);
  stats->callback([&] {
    AllocConfig cfg;
    Backend backend;
    if (!stats_flags.Resolve(cfg, backend)) {
      rc = 2;
      return;
    }
    std::string error;
    auto alloc = hardalloc::Allocator::Create(cfg, backend, &error);
    if (!alloc) {
      std::cerr << "hardalloc: " << error << "\n";
      rc = 2;
      return;
    }
    if (!stats_trace.empty()) {
      const auto ops = LoadTrace(stats_trace);
      if (!ops) {
        rc = 2;
        return;
      }
      hardalloc::harness::ReplayOptions opts;
      opts.check_every = 0;
      opts.backend = backend;
      const auto report = hardalloc::harness::Replay(*alloc, *ops, opts);
      std::cerr << report.Summary() << "\n";
      rc = report.ok() ? 0 : 1;
    }
    std::cout << alloc->StatsCsv();
  });

  // bench
  ConfigFlags bench_flags;
  hardalloc::bench::WorkloadSpec spec;
  std::string csv_path;
  auto* bench = app.add_subcommand("bench", "Run a workload and report time and footprint");
  bench->add_option("--workload", spec.workload, "Workload name")
      ->check(CLI::IsMember(std::vector<std::string>(std::begin(hardalloc::bench::kWorkloads),
                                                     std::end(hardalloc::bench::kWorkloads))));
  bench->add_option("--threads", spec.threads, "Threads")->check(CLI::PositiveNumber);
  bench->add_option("--ops", spec.ops, "Operations per thread");
  bench->add_option("--seed", spec.seed, "RNG seed");
  bench->add_option("--size", spec.size, "Block size for the pairs workload");
  bench->add_option("--csv", csv_path, "Append the result row to this CSV file");
  bench_flags.AddTo(bench);
  bench->callback([&] {
    AllocConfig cfg;
    if (!bench_flags.Resolve(cfg, spec.backend)) {
      rc = 2;
      return;
    }
    std::string error;
    const auto row = hardalloc::bench::RunWorkload(spec, cfg, &error);
    if (!row) {
      std::cerr << "hardalloc: " << error << "\n";
      rc = 2;
      return;
    }
    std::cout << hardalloc::bench::FormatCsv({*row});
    if (!csv_path.empty() && !hardalloc::bench::EmitCsv({*row}, csv_path, &error)) {
      std::cerr << "hardalloc: " << error << "\n";
      rc = 2;
    }
  });

  // gen-trace
  std::uint64_t gen_seed = 1;
  std::size_t gen_ops = 1000;
  unsigned gen_threads = 1;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-trace", "Write a random well-formed trace");
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--ops", gen_ops, "Number of operations");
  gen->add_option("--threads", gen_threads, "Spread ops over this many thread tags")
      ->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "Output file (default stdout)");
  gen->callback([&] {
    auto ops = hardalloc::harness::RandomTrace(gen_seed, gen_ops);
    std::mt19937_64 rng(gen_seed ^ 0x5bd1e995);
    std::uniform_int_distribution<unsigned> tag(0, gen_threads - 1);
    for (auto& op : ops) op.thread = tag(rng);
    const std::string text = hardalloc::harness::FormatTrace(ops);
    if (gen_out.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(gen_out);
    out << text;
    if (!out) {
      std::cerr << "hardalloc: cannot write " << gen_out << "\n";
      rc = 2;
    }
  });

  CLI11_PARSE(app, argc, argv);
  return rc;
}
