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

// Page-granular virtual memory.
//
// Both backends hand out real anonymous mappings so that addresses returned
// to clients are usable memory. They differ in how permissions and release
// are carried out:
//
//   kSim  Permissions are tracked in a table only; released pages are zeroed
//         in place. Guard and quarantine behavior is observed through
//         CheckedRead/CheckedWrite, which report a Fault instead of raising
//         a signal.
//   kOs   Permissions are applied with mprotect and released pages are
//         returned with madvise(MADV_DONTNEED). A stray access faults in
//         hardware.
//
// Residency (the RSS proxy) is bookkept identically in both: a page becomes
// resident when written through CheckedWrite or Touch, and stops being
// resident when released.

#ifndef HARDALLOC_PROVIDER_H_
#define HARDALLOC_PROVIDER_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string_view>

namespace hardalloc {

enum class Backend { kSim, kOs };
std::string_view ToString(Backend backend);
std::optional<Backend> ParseBackend(std::string_view text);

enum class PagePerm : std::uint8_t { kNone, kReadWrite };

enum class RegionKind {
  kData,
  // Excluded from footprint accounting.
  kMetadata,
  kLarge,
};

enum class FaultKind { kProtNone, kOutOfRange };

struct Fault {
  std::uint64_t region_id = 0;  // 0 when the address lies in no region
  std::size_t page = 0;
  FaultKind kind = FaultKind::kOutOfRange;

  friend bool operator==(const Fault&, const Fault&) = default;
};

class PageProvider;

class Region {
 public:
  Region(const Region&) = delete;
  Region& operator=(const Region&) = delete;
  ~Region();

  std::uint64_t id() const { return id_; }
  RegionKind kind() const { return kind_; }
  std::byte* base() const { return base_; }
  std::size_t length_pages() const { return pages_; }
  std::size_t length_bytes() const;
  bool Contains(const void* p) const;
  std::size_t OffsetOf(const void* p) const;

  // Drops residency and zero-fills [first_page, first_page + n_pages).
  std::optional<Fault> ReleasePages(std::size_t first_page, std::size_t n_pages);
  std::optional<Fault> Protect(std::size_t first_page, std::size_t n_pages,
                               PagePerm perm);

  // Succeed iff every touched page is kReadWrite. Zero-length accesses always
  // succeed. Writes mark touched pages resident.
  std::optional<Fault> CheckedRead(std::size_t offset,
                                   std::span<std::byte> out) const;
  std::optional<Fault> CheckedWrite(std::size_t offset,
                                    std::span<const std::byte> bytes);

  // Marks pages overlapping [offset, offset + len) resident. Used by the
  // allocator when it writes slot memory directly.
  void Touch(std::size_t offset, std::size_t len);

  std::size_t resident_count() const {
    return resident_count_.load(std::memory_order_relaxed);
  }
  // Resident pages within [first_page, first_page + n_pages).
  std::size_t ResidentIn(std::size_t first_page, std::size_t n_pages) const;
  PagePerm perm(std::size_t page) const;
  bool resident(std::size_t page) const;

 private:
  friend class PageProvider;
  Region(PageProvider* owner, std::uint64_t id, RegionKind kind,
         std::byte* base, std::size_t pages);

  std::optional<Fault> CheckRange(std::size_t first_page,
                                  std::size_t n_pages) const;
  std::optional<Fault> CheckAccess(std::size_t offset, std::size_t len) const;
  void MarkResident(std::size_t page);

  PageProvider* owner_;
  std::uint64_t id_;
  RegionKind kind_;
  std::byte* base_;
  std::size_t pages_;
  std::unique_ptr<std::atomic<std::uint8_t>[]> perm_;
  std::unique_ptr<std::atomic<std::uint8_t>[]> resident_;
  std::atomic<std::size_t> resident_count_{0};
};

class PageProvider {
 public:
  explicit PageProvider(Backend backend) : backend_(backend) {}
  PageProvider(const PageProvider&) = delete;
  PageProvider& operator=(const PageProvider&) = delete;
  ~PageProvider();

  Backend backend() const { return backend_; }

  // Fresh region of read-write, non-resident, zero pages. Returns nullptr if
  // `bytes` is zero or not page-granular, or if the mapping fails.
  Region* Reserve(std::size_t bytes, RegionKind kind = RegionKind::kData);
  // Unmaps the region starting at `base`. False if no region starts there.
  bool Unreserve(const void* base);

  // Region containing `p`, or nullptr.
  Region* Find(const void* p) const;

  // Address-based checked access; the range must lie in one region.
  std::optional<Fault> CheckedRead(const void* p, std::span<std::byte> out) const;
  std::optional<Fault> CheckedWrite(void* p, std::span<const std::byte> bytes);

  std::size_t region_count() const;
  // Resident pages across data and large regions.
  std::size_t footprint_pages() const {
    return footprint_.load(std::memory_order_relaxed);
  }
  std::size_t peak_footprint_pages() const {
    return peak_.load(std::memory_order_relaxed);
  }
  void ResetPeak() { peak_.store(footprint_pages(), std::memory_order_relaxed); }

 private:
  friend class Region;
  void AddFootprint(const Region& r, std::size_t pages);
  void SubFootprint(const Region& r, std::size_t pages);

  Backend backend_;
  mutable std::shared_mutex mu_;
  std::map<std::uintptr_t, std::unique_ptr<Region>> regions_;
  std::uint64_t next_id_ = 1;
  std::atomic<std::size_t> footprint_{0};
  std::atomic<std::size_t> peak_{0};
};

}  // namespace hardalloc

#endif  // HARDALLOC_PROVIDER_H_
