// src/alloc_tracker.cpp

// Copyright 2026 The SpatialEmb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Global operator new/delete replacements that keep a heap high-water mark
// while tracking is enabled. The bookkeeping map's own allocations are
// excluded via a thread-local re-entrancy guard. When tracking has never
// been (or is no longer) enabled the hooks reduce to one relaxed atomic
// load per call.

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <new>
#include <unordered_map>

#include "spatialemb/bench.hpp"

namespace spatialemb::alloc_tracker {

namespace {

std::atomic<bool> g_enabled{false};
std::atomic<bool> g_has_entries{false};
std::atomic<uint64_t> g_current{0};
std::atomic<uint64_t> g_peak{0};
thread_local bool t_in_hook = false;

std::mutex& Mutex() {
  static std::mutex mu;
  return mu;
}

// Leaked intentionally so hooks stay valid during static destruction.
std::unordered_map<void*, size_t>& LiveMap() {
  static auto* m = new std::unordered_map<void*, size_t>();
  return *m;
}

void Record(void* p, size_t sz) {
  if (t_in_hook) return;
  t_in_hook = true;
  {
    std::lock_guard<std::mutex> lock(Mutex());
    LiveMap()[p] = sz;
    uint64_t cur = g_current.fetch_add(sz) + sz;
    uint64_t peak = g_peak.load();
    while (cur > peak && !g_peak.compare_exchange_weak(peak, cur)) {
    }
    g_has_entries.store(true, std::memory_order_relaxed);
  }
  t_in_hook = false;
}

void Forget(void* p) {
  if (t_in_hook) return;
  t_in_hook = true;
  {
    std::lock_guard<std::mutex> lock(Mutex());
    auto& m = LiveMap();
    auto it = m.find(p);
    if (it != m.end()) {
      g_current.fetch_sub(it->second);
      m.erase(it);
      if (m.empty()) g_has_entries.store(false, std::memory_order_relaxed);
    }
  }
  t_in_hook = false;
}

}  // namespace

void Enable() { g_enabled.store(true, std::memory_order_relaxed); }

void Disable() {
  g_enabled.store(false, std::memory_order_relaxed);
  // clear() frees map nodes, which re-enters the delete hook; the guard
  // makes those calls no-ops while the mutex is held.
  t_in_hook = true;
  {
    std::lock_guard<std::mutex> lock(Mutex());
    LiveMap().clear();
    g_has_entries.store(false, std::memory_order_relaxed);
    g_current.store(0);
    g_peak.store(0);
  }
  t_in_hook = false;
}

void ResetPeak() { g_peak.store(g_current.load()); }

uint64_t PeakBytes() { return g_peak.load(); }

uint64_t CurrentBytes() { return g_current.load(); }

namespace internal {

inline void OnAlloc(void* p, size_t sz) {
  if (g_enabled.load(std::memory_order_relaxed)) Record(p, sz);
}

inline void OnFree(void* p) {
  if (g_has_entries.load(std::memory_order_relaxed)) Forget(p);
}

}  // namespace internal

}  // namespace spatialemb::alloc_tracker

namespace at = spatialemb::alloc_tracker::internal;

void* operator new(std::size_t sz) {
  void* p = std::malloc(sz ? sz : 1);
  if (!p) throw std::bad_alloc();
  at::OnAlloc(p, sz);
  return p;
}

void* operator new[](std::size_t sz) {
  void* p = std::malloc(sz ? sz : 1);
  if (!p) throw std::bad_alloc();
  at::OnAlloc(p, sz);
  return p;
}

void* operator new(std::size_t sz, const std::nothrow_t&) noexcept {
  void* p = std::malloc(sz ? sz : 1);
  if (p) at::OnAlloc(p, sz);
  return p;
}

void* operator new[](std::size_t sz, const std::nothrow_t&) noexcept {
  void* p = std::malloc(sz ? sz : 1);
  if (p) at::OnAlloc(p, sz);
  return p;
}

void* operator new(std::size_t sz, std::align_val_t al) {
  void* p = std::aligned_alloc(size_t(al), (sz + size_t(al) - 1) &
                                               ~(size_t(al) - 1));
  if (!p) throw std::bad_alloc();
  at::OnAlloc(p, sz);
  return p;
}

void* operator new[](std::size_t sz, std::align_val_t al) {
  return ::operator new(sz, al);
}

void operator delete(void* p) noexcept {
  if (!p) return;
  at::OnFree(p);
  std::free(p);
}

void operator delete[](void* p) noexcept { ::operator delete(p); }

void operator delete(void* p, std::size_t) noexcept { ::operator delete(p); }

void operator delete[](void* p, std::size_t) noexcept {
  ::operator delete(p);
}

void operator delete(void* p, const std::nothrow_t&) noexcept {
  ::operator delete(p);
}

void operator delete[](void* p, const std::nothrow_t&) noexcept {
  ::operator delete(p);
}

void operator delete(void* p, std::align_val_t) noexcept {
  ::operator delete(p);
}

void operator delete[](void* p, std::align_val_t) noexcept {
  ::operator delete(p);
}

void operator delete(void* p, std::size_t, std::align_val_t) noexcept {
  ::operator delete(p);
}

void operator delete[](void* p, std::size_t, std::align_val_t) noexcept {
  ::operator delete(p);
}
