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
#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ssdsim/common.hpp"

namespace ssdsim {

struct CacheConfig {
  std::uint64_t cache_pages = 4096;  // total slots, rounded down to full sets
  std::uint32_t set_size = 12;
  int gclock_cap = 8;    // saturation cap on the hit counter
  int insert_hits = 1;   // hit counter assigned on insertion
  bool debug_checks = false;
  void validate() const;
};

/// Wiring to the rest of the stack. Fill reads and blocking victim writebacks
/// go out at high priority; dirtying notifies the flusher.
struct CacheHooks {
  // cb(completion_time, device_content_tag)
  std::function<void(std::uint64_t page,
                     std::function<void(SimTime, std::uint64_t)> cb)>
      issue_fill_read;
  // cb(completion_time)
  std::function<void(std::uint64_t page, std::uint64_t tag,
                     std::function<void(SimTime)> cb)>
      issue_victim_write;
  std::function<void(std::uint32_t set_id)> page_dirtied;
  // Schedules fn at the current virtual time (used to retry parked accesses).
  std::function<void(std::function<void(SimTime)> fn)> defer;
  // Test probe, optional: fired when a resident page leaves the cache.
  std::function<void(std::uint64_t page, bool was_dirty)> on_evict;
};

/// Minimal slot view for the GClock sweep; shared with the test oracle.
struct SweepSlot {
  bool eligible = false;
  int hits = 0;
};

/// One GClock sweep over a set: decrements the hit counter of eligible slots
/// as the hand passes, returns the first eligible slot reaching zero, or -1
/// if no slot is eligible. The hand ends up one past the victim.
int gclock_sweep(std::span<SweepSlot> slots, std::uint32_t& hand);

class PageCache {
 public:
  struct ScoreEntry {
    int slot = -1;
    int distance_score = 0;
    int flush_score = 0;
  };
  struct FlushCandidate {
    std::uint64_t page = 0;
    std::uint64_t dirty_version = 0;
    std::uint64_t tag = 0;
    int flush_score = 0;
  };

  PageCache(const CacheConfig& cfg, CacheHooks hooks);

  /// Serves one page access. `done` runs when the access is complete in
  /// virtual time: immediately for hits and clean-victim full writes, after
  /// device I/O otherwise. `tag` identifies the written data version.
  void access(std::uint64_t page, bool is_write, bool partial, SimTime now,
              std::uint64_t tag, std::function<void(SimTime)> done);

  /// Flush/writeback completion: page turns clean only if its dirty version
  /// still matches the snapshot taken at issue time.
  void mark_clean(std::uint64_t page, std::uint64_t version);

  // Staleness view used by the queues' discard policy.
  bool resident(std::uint64_t page) const;
  bool is_dirty(std::uint64_t page) const;
  std::uint64_t dirty_version(std::uint64_t page) const;
  std::uint64_t data_tag(std::uint64_t page) const;
  /// Rank of the page among all resident pages of its set by ascending
  /// distance score; higher rank = more likely to be evicted soon.
  int flush_rank(std::uint64_t page) const;

  // Flusher interface.
  std::vector<ScoreEntry> compute_flush_scores(std::uint32_t set_id) const;
  std::vector<FlushCandidate> select_flush_candidates(std::uint32_t set_id,
                                                      int batch, int min_score);
  bool has_flushable(std::uint32_t set_id, int min_score) const;
  void clear_flush_pending(std::uint64_t page);

  std::uint32_t set_of(std::uint64_t page) const;
  std::uint32_t num_sets() const { return num_sets_; }
  int dirty_count(std::uint32_t set_id) const {
    return sets_[set_id].dirty_count;
  }

  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }
  std::uint64_t victim_writebacks() const { return victim_writebacks_; }

  void for_each_resident(
      const std::function<void(std::uint64_t page, bool dirty,
                               std::uint64_t tag)>& fn) const;
  void check_invariants() const;

 private:
  struct Slot {
    static constexpr std::uint64_t kNoPage = ~0ull;
    std::uint64_t page = kNoPage;
    enum class State : std::uint8_t { Empty, Clean, Dirty } state = State::Empty;
    int hits = 0;
    std::uint64_t dirty_version = 0;
    std::uint64_t tag = 0;
    bool flush_pending = false;
    bool busy = false;      // fill or eviction writeback in flight
    bool evicting = false;  // busy writing back the old occupant
    bool resident() const {
      return state != State::Empty && !busy;
    }
  };
  struct Pending {
    std::uint64_t page;
    bool is_write;
    bool partial;
    std::uint64_t tag;
    std::function<void(SimTime)> done;
  };
  struct Set {
    std::vector<Slot> slots;
    std::uint32_t clock_hand = 0;
    int dirty_count = 0;
    std::deque<Pending> parked;  // accesses waiting for any slot
    std::vector<std::vector<Pending>> waiters;  // per slot, same-page waiters
  };

  void access_inner(Pending p, SimTime now);
  void apply_resident(Set& set, int slot, Pending& p, SimTime now);
  void dirty_slot(std::uint32_t set_id, Slot& sl, std::uint64_t tag);
  void claim(std::uint32_t set_id, int slot, Pending p, SimTime now);
  int sweep(Set& set, bool clean_only);
  void evict_slot(std::uint32_t set_id, int slot);
  void drain_parked(std::uint32_t set_id);
  int find_slot(const Set& set, std::uint64_t page) const;
  int distance(const Set& set, int slot) const;
  const Slot* resident_slot(std::uint64_t page) const;

  CacheConfig cfg_;
  CacheHooks hooks_;
  std::uint32_t num_sets_ = 0;
  std::vector<Set> sets_;
  std::uint64_t next_dirty_version_ = 0;  // global dirtying generation
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
  std::uint64_t victim_writebacks_ = 0;
};

}  // namespace ssdsim
