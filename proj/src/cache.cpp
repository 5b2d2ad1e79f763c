/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "ssdsim/cache.hpp"

#include <algorithm>

namespace ssdsim {

void CacheConfig::validate() const {
  if (set_size == 0) throw ConfigError("cache: set_size must be > 0");
  if (cache_pages < set_size)
    throw ConfigError("cache: cache_pages must be >= set_size");
  if (gclock_cap < 0) throw ConfigError("cache: gclock_cap must be >= 0");
  if (insert_hits < 0 || insert_hits > gclock_cap)
    throw ConfigError("cache: insert_hits must be in [0, gclock_cap]");
}

int gclock_sweep(std::span<SweepSlot> slots, std::uint32_t& hand) {
  const std::uint32_t n = static_cast<std::uint32_t>(slots.size());
  bool any = false;
  for (const auto& s : slots) any = any || s.eligible;
  if (!any) return -1;
  for (;;) {
    SweepSlot& s = slots[hand];
    if (s.eligible) {
      if (s.hits <= 0) {
        const int victim = static_cast<int>(hand);
        hand = (hand + 1) % n;
        return victim;
      }
      --s.hits;
    }
    hand = (hand + 1) % n;
  }
}

PageCache::PageCache(const CacheConfig& cfg, CacheHooks hooks)
    : cfg_(cfg), hooks_(std::move(hooks)) {
  cfg_.validate();
  num_sets_ = static_cast<std::uint32_t>(
      std::max<std::uint64_t>(1, cfg_.cache_pages / cfg_.set_size));
  sets_.resize(num_sets_);
  for (auto& s : sets_) {
    s.slots.resize(cfg_.set_size);
    s.waiters.resize(cfg_.set_size);
  }
}

std::uint32_t PageCache::set_of(std::uint64_t page) const {
  std::uint64_t h = page * 0x9e3779b97f4a7c15ull;
  h ^= h >> 32;
  return static_cast<std::uint32_t>(h % num_sets_);
}

int PageCache::find_slot(const Set& set, std::uint64_t page) const {
  for (std::size_t i = 0; i < set.slots.size(); ++i) {
    const Slot& sl = set.slots[i];
    if (sl.page == page && sl.state != Slot::State::Empty && !sl.evicting)
      return static_cast<int>(i);
    if (sl.page == page && sl.busy && !sl.evicting)  // fill in flight
      return static_cast<int>(i);
  }
  return -1;
}

int PageCache::distance(const Set& set, int slot) const {
  const std::uint32_t n = cfg_.set_size;
  return static_cast<int>((static_cast<std::uint32_t>(slot) + n -
                           set.clock_hand) % n);
}

void PageCache::access(std::uint64_t page, bool is_write, bool partial,
                       SimTime now, std::uint64_t tag,
                       std::function<void(SimTime)> done) {
  const Set& S = sets_[set_of(page)];
  if (find_slot(S, page) >= 0)
    ++hits_;
  else
    ++misses_;
  access_inner(Pending{page, is_write, partial, tag, std::move(done)}, now);
  if (cfg_.debug_checks) check_invariants();
}

void PageCache::access_inner(Pending p, SimTime now) {
  const std::uint32_t set_id = set_of(p.page);
  Set& S = sets_[set_id];
  const int idx = find_slot(S, p.page);
  if (idx >= 0) {
    Slot& sl = S.slots[idx];
    if (sl.busy) {
      S.waiters[idx].push_back(std::move(p));
      return;
    }
    apply_resident(S, idx, p, now);
    return;
  }

  int slot = -1;
  for (std::size_t i = 0; i < S.slots.size(); ++i) {
    if (S.slots[i].state == Slot::State::Empty && !S.slots[i].busy) {
      slot = static_cast<int>(i);
      break;
    }
  }
  if (slot < 0) {
    slot = sweep(S, /*clean_only=*/true);
    if (slot >= 0) evict_slot(set_id, slot);
  }
  if (slot < 0) {
    slot = sweep(S, /*clean_only=*/false);
    if (slot < 0) {
      // Everything busy or flush-pending; retried when the set changes.
      S.parked.push_back(std::move(p));
      return;
    }
    Slot& v = S.slots[slot];
    v.busy = true;
    v.evicting = true;
    ++victim_writebacks_;
    hooks_.issue_victim_write(
        v.page, v.tag, [this, set_id, slot, p = std::move(p)](SimTime t) mutable {
          Set& set = sets_[set_id];
          Slot& vs = set.slots[slot];
          vs.busy = false;
          vs.evicting = false;
          evict_slot(set_id, slot);
          access_inner(std::move(p), t);
          drain_parked(set_id);
        });
    return;
  }
  claim(set_id, slot, std::move(p), now);
}

void PageCache::apply_resident(Set& set, int slot, Pending& p, SimTime now) {
  Slot& sl = set.slots[slot];
  sl.hits = std::min(sl.hits + 1, cfg_.gclock_cap);
  const std::uint32_t set_id = static_cast<std::uint32_t>(&set - sets_.data());
  if (p.is_write) dirty_slot(set_id, sl, p.tag);
  p.done(now);
}

void PageCache::dirty_slot(std::uint32_t set_id, Slot& sl, std::uint64_t tag) {
  if (sl.state != Slot::State::Dirty) {
    sl.state = Slot::State::Dirty;
    ++sets_[set_id].dirty_count;
  }
  sl.dirty_version = ++next_dirty_version_;
  // Concurrent writes to one page can be applied out of submission order
  // (parked ops, victim-writeback closures); newest data must win.
  sl.tag = std::max(sl.tag, tag);
  if (hooks_.page_dirtied) hooks_.page_dirtied(set_id);
}

void PageCache::claim(std::uint32_t set_id, int slot, Pending p, SimTime now) {
  Set& S = sets_[set_id];
  Slot& sl = S.slots[slot];
  sl.page = p.page;
  sl.hits = cfg_.insert_hits;
  sl.flush_pending = false;
  sl.dirty_version = 0;
  sl.evicting = false;

  if (p.is_write && !p.partial) {
    // Full-page write absorbed by the cache, no device round trip.
    sl.busy = false;
    sl.state = Slot::State::Clean;
    dirty_slot(set_id, sl, p.tag);
    p.done(now);
    return;
  }

  // Read miss or partial write: read-update-write needs the device copy.
  sl.busy = true;
  sl.state = Slot::State::Empty;
  hooks_.issue_fill_read(
      p.page,
      [this, set_id, slot, p = std::move(p)](SimTime t,
                                             std::uint64_t dev_tag) mutable {
        Set& set = sets_[set_id];
        Slot& sl = set.slots[slot];
        sl.busy = false;
        sl.state = Slot::State::Clean;
        sl.tag = dev_tag;
        if (p.is_write) dirty_slot(set_id, sl, p.tag);
        p.done(t);
        auto waiters = std::move(set.waiters[slot]);
        set.waiters[slot].clear();
        for (auto& w : waiters) apply_resident(set, slot, w, t);
      });
}

int PageCache::sweep(Set& set, bool clean_only) {
  std::vector<SweepSlot> view(set.slots.size());
  for (std::size_t i = 0; i < set.slots.size(); ++i) {
    const Slot& sl = set.slots[i];
    bool eligible;
    if (clean_only) {
      eligible = sl.state == Slot::State::Clean && !sl.busy;
    } else {
      // A flush-pending page has a write in flight against its current
      // version; evicting it concurrently could reorder device writes.
      eligible = sl.state != Slot::State::Empty && !sl.busy && !sl.flush_pending;
    }
    view[i] = SweepSlot{eligible, sl.hits};
  }
  std::uint32_t hand = set.clock_hand;
  const int victim = gclock_sweep(view, hand);
  if (victim < 0) return -1;
  set.clock_hand = hand;
  for (std::size_t i = 0; i < set.slots.size(); ++i)
    if (view[i].eligible) set.slots[i].hits = view[i].hits;
  return victim;
}

void PageCache::evict_slot(std::uint32_t set_id, int slot) {
  Set& S = sets_[set_id];
  Slot& sl = S.slots[slot];
  SSDSIM_CHECK(sl.state != Slot::State::Empty, "cache: evicting empty slot");
  const bool was_dirty = sl.state == Slot::State::Dirty;
  if (was_dirty) --S.dirty_count;
  if (hooks_.on_evict) hooks_.on_evict(sl.page, was_dirty);
  sl = Slot{};
}

void PageCache::drain_parked(std::uint32_t set_id) {
  Set& S = sets_[set_id];
  if (S.parked.empty()) return;
  hooks_.defer([this, set_id](SimTime now) {
    Set& set = sets_[set_id];
    std::size_t n = set.parked.size();
    for (std::size_t i = 0; i < n && !set.parked.empty(); ++i) {
      Pending p = std::move(set.parked.front());
      set.parked.pop_front();
      access_inner(std::move(p), now);
    }
  });
}

void PageCache::mark_clean(std::uint64_t page, std::uint64_t version) {
  const std::uint32_t set_id = set_of(page);
  Set& S = sets_[set_id];
  const int idx = find_slot(S, page);
  if (idx < 0) return;  // evicted via the blocking path
  Slot& sl = S.slots[idx];
  if (sl.busy) return;
  if (sl.state == Slot::State::Dirty && sl.dirty_version == version) {
    sl.state = Slot::State::Clean;
    --S.dirty_count;
    drain_parked(set_id);
  }
}

const PageCache::Slot* PageCache::resident_slot(std::uint64_t page) const {
  const Set& S = sets_[set_of(page)];
  const int idx = find_slot(S, page);
  if (idx < 0) return nullptr;
  const Slot& sl = S.slots[idx];
  return sl.resident() ? &sl : nullptr;
}

bool PageCache::resident(std::uint64_t page) const {
  return resident_slot(page) != nullptr;
}

bool PageCache::is_dirty(std::uint64_t page) const {
  const Slot* sl = resident_slot(page);
  return sl != nullptr && sl->state == Slot::State::Dirty;
}

std::uint64_t PageCache::dirty_version(std::uint64_t page) const {
  const Slot* sl = resident_slot(page);
  SSDSIM_CHECK(sl, "cache: dirty_version of non-resident page");
  return sl->dirty_version;
}

std::uint64_t PageCache::data_tag(std::uint64_t page) const {
  const Slot* sl = resident_slot(page);
  SSDSIM_CHECK(sl, "cache: data_tag of non-resident page");
  return sl->tag;
}

int PageCache::flush_rank(std::uint64_t page) const {
  const std::uint32_t set_id = set_of(page);
  const Set& S = sets_[set_id];
  std::vector<std::pair<int, int>> order;  // (distance_score, slot)
  int target = -1;
  for (std::size_t i = 0; i < S.slots.size(); ++i) {
    const Slot& sl = S.slots[i];
    if (!sl.resident()) continue;
    const int ds = sl.hits * static_cast<int>(cfg_.set_size) +
                   distance(S, static_cast<int>(i));
    order.emplace_back(ds, static_cast<int>(i));
    if (sl.page == page) target = static_cast<int>(i);
  }
  SSDSIM_CHECK(target >= 0, "cache: flush_rank of non-resident page");
  std::sort(order.begin(), order.end());
  for (std::size_t i = 0; i < order.size(); ++i)
    if (order[i].second == target)
      return static_cast<int>(order.size() - 1 - i);
  return 0;
}

std::vector<PageCache::ScoreEntry> PageCache::compute_flush_scores(
    std::uint32_t set_id) const {
  // Ranked over ALL resident pages, matching flush_rank, so a score taken at
  // enqueue time is comparable with the discard check at the queue head.
  // Only flushable dirty slots are reported.
  const Set& S = sets_[set_id];
  std::vector<std::pair<int, int>> order;  // (distance_score, slot)
  for (std::size_t i = 0; i < S.slots.size(); ++i) {
    const Slot& sl = S.slots[i];
    if (!sl.resident()) continue;
    const int ds = sl.hits * static_cast<int>(cfg_.set_size) +
                   distance(S, static_cast<int>(i));
    order.emplace_back(ds, static_cast<int>(i));
  }
  std::sort(order.begin(), order.end());
  std::vector<ScoreEntry> out;
  const int k = static_cast<int>(order.size());
  for (int i = 0; i < k; ++i) {
    const Slot& sl = S.slots[order[i].second];
    if (sl.state != Slot::State::Dirty || sl.busy || sl.flush_pending) continue;
    out.push_back(ScoreEntry{order[i].second, order[i].first, k - 1 - i});
  }
  return out;  // descending flush_score: most urgent first
}

std::vector<PageCache::FlushCandidate> PageCache::select_flush_candidates(
    std::uint32_t set_id, int batch, int min_score) {
  auto scores = compute_flush_scores(set_id);
  Set& S = sets_[set_id];
  std::vector<FlushCandidate> out;
  for (int i = 0; i < batch && i < static_cast<int>(scores.size()); ++i) {
    if (scores[i].flush_score < min_score) break;  // scores are descending
    Slot& sl = S.slots[scores[i].slot];
    sl.flush_pending = true;
    out.push_back(
        FlushCandidate{sl.page, sl.dirty_version, sl.tag, scores[i].flush_score});
  }
  return out;
}

bool PageCache::has_flushable(std::uint32_t set_id, int min_score) const {
  const auto scores = compute_flush_scores(set_id);
  return !scores.empty() && scores.front().flush_score >= min_score;
}

void PageCache::clear_flush_pending(std::uint64_t page) {
  const std::uint32_t set_id = set_of(page);
  Set& S = sets_[set_id];
  const int idx = find_slot(S, page);
  if (idx < 0) return;
  if (S.slots[idx].flush_pending) {
    S.slots[idx].flush_pending = false;
    drain_parked(set_id);
  }
}

void PageCache::for_each_resident(
    const std::function<void(std::uint64_t, bool, std::uint64_t)>& fn) const {
  for (const Set& S : sets_)
    for (const Slot& sl : S.slots)
      if (sl.resident())
        fn(sl.page, sl.state == Slot::State::Dirty, sl.tag);
}

void PageCache::check_invariants() const {
  for (std::size_t s = 0; s < sets_.size(); ++s) {
    const Set& S = sets_[s];
    SSDSIM_CHECK(S.clock_hand < cfg_.set_size, "cache: clock hand out of range");
    int dirty = 0;
    for (const Slot& sl : S.slots) {
      SSDSIM_CHECK(sl.hits >= 0 && sl.hits <= cfg_.gclock_cap,
                   "cache: hit counter out of range");
      if (sl.state == Slot::State::Dirty) ++dirty;
      if (sl.flush_pending)
        SSDSIM_CHECK(sl.state == Slot::State::Dirty,
                     "cache: flush_pending on non-dirty slot");
    }
    SSDSIM_CHECK(dirty == S.dirty_count, "cache: dirty_count mismatch");
  }
}

}  // namespace ssdsim
