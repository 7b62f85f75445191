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

#include "hardalloc/provider.h"

#include <sys/mman.h>

#include <cstring>
#include <mutex>

#include "hardalloc/config.h"

namespace hardalloc {

std::string_view ToString(Backend backend) {
  return backend == Backend::kSim ? "sim" : "os";
}

std::optional<Backend> ParseBackend(std::string_view text) {
  if (text == "sim") return Backend::kSim;
  if (text == "os") return Backend::kOs;
  return std::nullopt;
}

Region::Region(PageProvider* owner, std::uint64_t id, RegionKind kind,
               std::byte* base, std::size_t pages)
    : owner_(owner),
      id_(id),
      kind_(kind),
      base_(base),
      pages_(pages),
      perm_(new std::atomic<std::uint8_t>[pages]),
      resident_(new std::atomic<std::uint8_t>[pages]) {
  for (std::size_t i = 0; i < pages; ++i) {
    perm_[i].store(static_cast<std::uint8_t>(PagePerm::kReadWrite),
                   std::memory_order_relaxed);
    resident_[i].store(0, std::memory_order_relaxed);
  }
}

Region::~Region() {
  const std::size_t live = resident_count();
  if (live != 0) owner_->SubFootprint(*this, live);
  ::munmap(base_, length_bytes());
}

std::size_t Region::length_bytes() const { return pages_ * kPageSize; }

bool Region::Contains(const void* p) const {
  const auto* b = static_cast<const std::byte*>(p);
  return b >= base_ && b < base_ + length_bytes();
}

std::size_t Region::OffsetOf(const void* p) const {
  return static_cast<std::size_t>(static_cast<const std::byte*>(p) - base_);
}

std::optional<Fault> Region::CheckRange(std::size_t first_page,
                                        std::size_t n_pages) const {
  if (first_page > pages_ || n_pages > pages_ - first_page)
    return Fault{id_, first_page, FaultKind::kOutOfRange};
  return std::nullopt;
}

std::optional<Fault> Region::CheckAccess(std::size_t offset,
                                         std::size_t len) const {
  if (len == 0) return std::nullopt;
  const std::size_t total = length_bytes();
  if (offset >= total || len > total - offset)
    return Fault{id_, offset / kPageSize, FaultKind::kOutOfRange};
  const std::size_t first = offset / kPageSize;
  const std::size_t last = (offset + len - 1) / kPageSize;
  for (std::size_t p = first; p <= last; ++p) {
    if (perm(p) != PagePerm::kReadWrite)
      return Fault{id_, p, FaultKind::kProtNone};
  }
  return std::nullopt;
}

void Region::MarkResident(std::size_t page) {
  if (resident_[page].exchange(1, std::memory_order_relaxed) == 0) {
    resident_count_.fetch_add(1, std::memory_order_relaxed);
    owner_->AddFootprint(*this, 1);
  }
}

std::optional<Fault> Region::ReleasePages(std::size_t first_page,
                                          std::size_t n_pages) {
  if (auto f = CheckRange(first_page, n_pages)) return f;
  for (std::size_t p = first_page; p < first_page + n_pages; ++p) {
    if (perm(p) != PagePerm::kReadWrite)
      return Fault{id_, p, FaultKind::kProtNone};
  }
  if (n_pages == 0) return std::nullopt;
  std::byte* start = base_ + first_page * kPageSize;
  if (owner_->backend() == Backend::kOs) {
    ::madvise(start, n_pages * kPageSize, MADV_DONTNEED);
  } else {
    std::memset(start, 0, n_pages * kPageSize);
  }
  std::size_t dropped = 0;
  for (std::size_t p = first_page; p < first_page + n_pages; ++p) {
    if (resident_[p].exchange(0, std::memory_order_relaxed) != 0) ++dropped;
  }
  if (dropped != 0) {
    resident_count_.fetch_sub(dropped, std::memory_order_relaxed);
    owner_->SubFootprint(*this, dropped);
  }
  return std::nullopt;
}

std::optional<Fault> Region::Protect(std::size_t first_page,
                                     std::size_t n_pages, PagePerm perm) {
  if (auto f = CheckRange(first_page, n_pages)) return f;
  if (n_pages == 0) return std::nullopt;
  if (owner_->backend() == Backend::kOs) {
    const int prot = perm == PagePerm::kNone ? PROT_NONE : PROT_READ | PROT_WRITE;
    ::mprotect(base_ + first_page * kPageSize, n_pages * kPageSize, prot);
  }
  for (std::size_t p = first_page; p < first_page + n_pages; ++p)
    perm_[p].store(static_cast<std::uint8_t>(perm), std::memory_order_relaxed);
  return std::nullopt;
}

std::optional<Fault> Region::CheckedRead(std::size_t offset,
                                         std::span<std::byte> out) const {
  if (auto f = CheckAccess(offset, out.size())) return f;
  if (!out.empty()) std::memcpy(out.data(), base_ + offset, out.size());
  return std::nullopt;
}

std::optional<Fault> Region::CheckedWrite(std::size_t offset,
                                          std::span<const std::byte> bytes) {
  if (auto f = CheckAccess(offset, bytes.size())) return f;
  if (bytes.empty()) return std::nullopt;
  std::memcpy(base_ + offset, bytes.data(), bytes.size());
  Touch(offset, bytes.size());
  return std::nullopt;
}

void Region::Touch(std::size_t offset, std::size_t len) {
  if (len == 0) return;
  const std::size_t first = offset / kPageSize;
  const std::size_t last = (offset + len - 1) / kPageSize;
  for (std::size_t p = first; p <= last && p < pages_; ++p) MarkResident(p);
}

std::size_t Region::ResidentIn(std::size_t first_page,
                               std::size_t n_pages) const {
  std::size_t n = 0;
  for (std::size_t p = first_page; p < first_page + n_pages && p < pages_; ++p)
    n += resident(p) ? 1 : 0;
  return n;
}

PagePerm Region::perm(std::size_t page) const {
  return static_cast<PagePerm>(perm_[page].load(std::memory_order_relaxed));
}

bool Region::resident(std::size_t page) const {
  return resident_[page].load(std::memory_order_relaxed) != 0;
}

PageProvider::~PageProvider() {
  std::unique_lock lock(mu_);
  regions_.clear();
}

Region* PageProvider::Reserve(std::size_t bytes, RegionKind kind) {
  if (bytes == 0 || bytes % kPageSize != 0) return nullptr;
  void* p = ::mmap(nullptr, bytes, PROT_READ | PROT_WRITE,
                   MAP_PRIVATE | MAP_ANONYMOUS | MAP_NORESERVE, -1, 0);
  if (p == MAP_FAILED) return nullptr;
  std::unique_lock lock(mu_);
  auto region = std::unique_ptr<Region>(new Region(
      this, next_id_++, kind, static_cast<std::byte*>(p), bytes / kPageSize));
  Region* raw = region.get();
  regions_.emplace(reinterpret_cast<std::uintptr_t>(p), std::move(region));
  return raw;
}

bool PageProvider::Unreserve(const void* base) {
  std::unique_ptr<Region> doomed;
  {
    std::unique_lock lock(mu_);
    auto it = regions_.find(reinterpret_cast<std::uintptr_t>(base));
    if (it == regions_.end()) return false;
    doomed = std::move(it->second);
    regions_.erase(it);
  }
  return true;
}

Region* PageProvider::Find(const void* p) const {
  const auto addr = reinterpret_cast<std::uintptr_t>(p);
  std::shared_lock lock(mu_);
  auto it = regions_.upper_bound(addr);
  if (it == regions_.begin()) return nullptr;
  --it;
  return it->second->Contains(p) ? it->second.get() : nullptr;
}

std::optional<Fault> PageProvider::CheckedRead(const void* p,
                                               std::span<std::byte> out) const {
  const Region* r = Find(p);
  if (r == nullptr) return Fault{0, 0, FaultKind::kOutOfRange};
  return r->CheckedRead(r->OffsetOf(p), out);
}

std::optional<Fault> PageProvider::CheckedWrite(void* p,
                                                std::span<const std::byte> bytes) {
  Region* r = Find(p);
  if (r == nullptr) return Fault{0, 0, FaultKind::kOutOfRange};
  return r->CheckedWrite(r->OffsetOf(p), bytes);
}

std::size_t PageProvider::region_count() const {
  std::shared_lock lock(mu_);
  return regions_.size();
}

void PageProvider::AddFootprint(const Region& r, std::size_t pages) {
  if (r.kind() == RegionKind::kMetadata) return;
  const std::size_t now =
      footprint_.fetch_add(pages, std::memory_order_relaxed) + pages;
  std::size_t peak = peak_.load(std::memory_order_relaxed);
  while (now > peak &&
         !peak_.compare_exchange_weak(peak, now, std::memory_order_relaxed)) {
  }
}

void PageProvider::SubFootprint(const Region& r, std::size_t pages) {
  if (r.kind() == RegionKind::kMetadata) return;
  footprint_.fetch_sub(pages, std::memory_order_relaxed);
}

}  // namespace hardalloc
