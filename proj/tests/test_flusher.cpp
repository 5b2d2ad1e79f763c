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
#include <doctest.h>

#include <vector>

#include "ssdsim/cache.hpp"
#include "ssdsim/flusher.hpp"

using namespace ssdsim;

namespace {
// Cache + flusher wired to an inspectable low queue that never runs.
struct Rig {
  std::vector<FlushRequest> enqueued;
  bool accept = true;
  CacheConfig ccfg;
  PageCache cache;
  Flusher flusher;

  explicit Rig(FlusherConfig fcfg, std::uint32_t sets = 2,
               std::uint32_t set_size = 12)
      : ccfg(make_ccfg(sets, set_size)),
        cache(ccfg, hooks()),
        flusher(fcfg, cache, 1, [](std::uint64_t) { return 0u; },
                [](std::uint64_t p) { return p; },
                [this](std::uint32_t, FlushRequest r) {
                  if (!accept) return false;
                  enqueued.push_back(std::move(r));
                  return true;
                }) {}

  static CacheConfig make_ccfg(std::uint32_t sets, std::uint32_t set_size) {
    CacheConfig c;
    c.cache_pages = sets * set_size;
    c.set_size = set_size;
    c.debug_checks = true;
    return c;
  }

  CacheHooks hooks() {
    CacheHooks h;
    h.issue_fill_read = [](std::uint64_t,
                           std::function<void(SimTime, std::uint64_t)> cb) {
      cb(0, 0);
    };
    h.issue_victim_write = [](std::uint64_t, std::uint64_t,
                              std::function<void(SimTime)> cb) { cb(0); };
    h.page_dirtied = [this](std::uint32_t set_id) {
      flusher.on_page_dirtied(set_id);
    };
    h.defer = [](std::function<void(SimTime)> fn) { fn(0); };
    return h;
  }

  // Dirties `count` distinct pages of the given set.
  void dirty_pages(std::uint32_t set_id, int count) {
    int made = 0;
    for (std::uint64_t p = 0; made < count; ++p) {
      if (cache.set_of(p) != set_id) continue;
      cache.access(p, true, false, 0, p + 1, [](SimTime) {});
      ++made;
    }
  }
};

FlusherConfig fcfg(int dirty_threshold, int batch = 2, int min_score = 0,
                   std::uint32_t cap = 2048) {
  FlusherConfig f;
  f.dirty_threshold = dirty_threshold;
  f.batch = batch;
  f.min_score = min_score;
  f.cap_per_ssd = cap;
  return f;
}
}  // namespace

TEST_CASE("config validation") {
  FlusherConfig f;
  CHECK_NOTHROW(f.validate());
  f.batch = 3;
  CHECK_THROWS_AS(f.validate(), ConfigError);
  f = FlusherConfig{};
  f.cap_per_ssd = 0;
  CHECK_THROWS_AS(f.validate(), ConfigError);
}

TEST_CASE("flushing starts only past the dirty threshold") {
  Rig rig(fcfg(3));
  rig.dirty_pages(0, 3);
  CHECK(rig.enqueued.empty());  // at the threshold, not past it
  // The fourth dirty page triggers set 1; with no completions shrinking the
  // dirty count, the pump drains every flushable page of the set.
  rig.dirty_pages(1, 4);
  CHECK(rig.enqueued.size() == 4);
  for (const auto& r : rig.enqueued) CHECK(rig.cache.set_of(r.page) == 1);
}

TEST_CASE("triggered sets are pumped round-robin, batch pages at a time") {
  for (const int batch : {1, 2}) {
    CAPTURE(batch);
    Rig rig(fcfg(2, batch, 0, 1024));
    rig.accept = false;  // hold the queue shut while dirtying
    rig.dirty_pages(0, 6);
    rig.dirty_pages(1, 6);
    rig.accept = true;
    rig.flusher.pump();
    REQUIRE(rig.enqueued.size() == 12);
    CHECK(rig.flusher.stats().issued_per_set[0] == 6);
    CHECK(rig.flusher.stats().issued_per_set[1] == 6);
    CHECK(rig.flusher.outstanding() == 12);
    CHECK_FALSE(rig.flusher.set_in_fifo(0));
    CHECK_FALSE(rig.flusher.set_in_fifo(1));
    // Sets alternate every `batch` requests.
    for (std::size_t i = 0; i + batch < 12; ++i) {
      const bool same_set = rig.cache.set_of(rig.enqueued[i].page) ==
                            rig.cache.set_of(rig.enqueued[i + batch].page);
      CHECK_FALSE(same_set);
    }
  }
}

TEST_CASE("the global cap bounds outstanding flushes") {
  Rig rig(fcfg(0, 2, 0, 3));  // cap_per_ssd=3, one ssd
  rig.dirty_pages(0, 10);
  CHECK(rig.flusher.outstanding() == 3);
  CHECK(rig.enqueued.size() == 3);
  // A completion frees a slot and the pump refills it.
  const FlushRequest r = rig.enqueued[0];
  rig.flusher.on_flush_event(r, true, std::nullopt);
  CHECK(rig.flusher.outstanding() == 3);
  CHECK(rig.enqueued.size() == 4);
  CHECK(rig.flusher.stats().completed == 1);
  CHECK_FALSE(rig.cache.is_dirty(r.page));
}

TEST_CASE("queue pushback rolls the attempt back") {
  Rig rig(fcfg(3));
  rig.accept = false;
  rig.dirty_pages(0, 5);
  CHECK(rig.enqueued.empty());
  CHECK(rig.flusher.outstanding() == 0);
  CHECK(rig.flusher.stats().issued == 0);
  // The candidates it probed must not be left marked flush-pending.
  CHECK(rig.cache.select_flush_candidates(0, 12, 0).size() == 5);
}

TEST_CASE("discard outcomes are tallied and release the slot") {
  Rig rig(fcfg(0, 2, 0, 2));
  rig.dirty_pages(0, 6);
  REQUIRE(rig.enqueued.size() == 2);
  rig.flusher.on_flush_event(rig.enqueued[0], false, DiscardReason::Evicted);
  rig.flusher.on_flush_event(rig.enqueued[1], false, DiscardReason::LowScore);
  CHECK(rig.flusher.stats().discarded_evicted == 1);
  CHECK(rig.flusher.stats().discarded_lowscore == 1);
  // Both slots were refilled by the post-event pump.
  CHECK(rig.flusher.outstanding() == 2);
}

TEST_CASE("min_score keeps cold pages out of the low queue") {
  const int n = 12;
  Rig rig(fcfg(0, 2, n - 2), 1, n);
  // Fill the set with reads, then dirty the two oldest slots. At that point
  // they are the coldest residents and score too low for the bar.
  std::vector<std::uint64_t> pages;
  for (std::uint64_t p = 0; static_cast<int>(pages.size()) < n; ++p)
    if (rig.cache.set_of(p) == 0) pages.push_back(p);
  for (const std::uint64_t p : pages)
    rig.cache.access(p, false, false, 0, 0, [](SimTime) {});
  rig.cache.access(pages[0], true, false, 0, 1, [](SimTime) {});
  rig.cache.access(pages[1], true, false, 0, 2, [](SimTime) {});
  CHECK(rig.enqueued.empty());
  // Heat up the other ten pages: the dirty two now lead the eviction order.
  for (int round = 0; round < 3; ++round)
    for (int i = 2; i < n; ++i)
      rig.cache.access(pages[i], false, false, 0, 0, [](SimTime) {});
  rig.flusher.on_page_dirtied(0);
  REQUIRE(rig.enqueued.size() == 2);
  CHECK(rig.enqueued[0].score_at_enqueue == n - 1);
  CHECK(rig.enqueued[1].score_at_enqueue == n - 2);
  CHECK_FALSE(rig.cache.has_flushable(0, n - 2));
}

TEST_CASE("a disabled flusher stays quiet") {
  FlusherConfig f = fcfg(0);
  f.enabled = false;
  Rig rig(f);
  rig.dirty_pages(0, 8);
  rig.flusher.pump();
  CHECK(rig.enqueued.empty());
  CHECK(rig.flusher.stats().issued == 0);
}
