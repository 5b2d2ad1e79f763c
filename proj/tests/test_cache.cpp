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

#include "oracles.hpp"
#include "ssdsim/cache.hpp"

using namespace ssdsim;

namespace {
// Hooks with an immediate device: fills and writebacks complete in-line.
struct Harness {
  std::uint64_t fills = 0;
  std::uint64_t writebacks = 0;
  std::uint64_t last_writeback_page = ~0ull;
  CacheHooks hooks() {
    CacheHooks h;
    h.issue_fill_read = [this](std::uint64_t,
                               std::function<void(SimTime, std::uint64_t)> cb) {
      ++fills;
      cb(0, 0);
    };
    h.issue_victim_write = [this](std::uint64_t page, std::uint64_t,
                                  std::function<void(SimTime)> cb) {
      ++writebacks;
      last_writeback_page = page;
      cb(0);
    };
    h.page_dirtied = [](std::uint32_t) {};
    h.defer = [](std::function<void(SimTime)> fn) { fn(0); };
    return h;
  }
};

CacheConfig one_set(std::uint32_t n) {
  CacheConfig c;
  c.cache_pages = n;
  c.set_size = n;
  c.debug_checks = true;
  return c;
}
}  // namespace

TEST_CASE("gclock sweep matches the closed-form reference") {
  CHECK(oracles::gclock_mismatches(20000, 4, 11) == 0);
}

TEST_CASE("gclock sweep with no eligible slot reports none") {
  std::vector<SweepSlot> slots(4);
  std::uint32_t hand = 2;
  CHECK(gclock_sweep(slots, hand) == -1);
  CHECK(hand == 2);
}

TEST_CASE("gclock hand stops one past the victim") {
  std::vector<SweepSlot> slots{{true, 1}, {true, 0}, {true, 2}};
  std::uint32_t hand = 0;
  CHECK(gclock_sweep(slots, hand) == 1);
  CHECK(hand == 2);
  CHECK(slots[0].hits == 0);  // decremented on the way past
  CHECK(slots[2].hits == 2);  // never reached
}

TEST_CASE("flush scores match the shadow model") {
  CHECK(oracles::flush_score_mismatches(12000, 13) == 0);
}

TEST_CASE("hit and miss accounting") {
  Harness h;
  PageCache cache(one_set(4), h.hooks());
  cache.access(1, true, false, 0, 1, [](SimTime) {});
  cache.access(1, false, false, 0, 0, [](SimTime) {});
  cache.access(2, false, false, 0, 0, [](SimTime) {});
  CHECK(cache.hits() == 1);
  CHECK(cache.misses() == 2);
  CHECK(h.fills == 1);  // the read miss; the full write needed no device copy
}

TEST_CASE("full-page write misses are absorbed without device reads") {
  Harness h;
  PageCache cache(one_set(4), h.hooks());
  std::uint64_t done_at = 99;
  cache.access(7, true, false, 0, 1, [&](SimTime t) { done_at = t; });
  CHECK(done_at == 0);  // completed synchronously
  CHECK(h.fills == 0);
  CHECK(cache.is_dirty(7));
  CHECK(cache.data_tag(7) == 1);
}

TEST_CASE("partial writes fetch the device copy first") {
  Harness h;
  PageCache cache(one_set(4), h.hooks());
  cache.access(7, true, true, 0, 5, [](SimTime) {});
  CHECK(h.fills == 1);
  CHECK(cache.is_dirty(7));
  CHECK(cache.data_tag(7) == 5);
}

TEST_CASE("clean pages are evicted before dirty ones") {
  Harness h;
  PageCache cache(one_set(3), h.hooks());
  cache.access(0, true, false, 0, 1, [](SimTime) {});   // dirty
  cache.access(1, false, false, 0, 0, [](SimTime) {});  // clean
  cache.access(2, true, false, 0, 2, [](SimTime) {});   // dirty
  cache.access(3, true, false, 0, 3, [](SimTime) {});   // forces an eviction
  CHECK(h.writebacks == 0);  // the clean page went quietly
  CHECK_FALSE(cache.resident(1));
  CHECK(cache.resident(0));
  CHECK(cache.resident(2));
  CHECK(cache.resident(3));
}

TEST_CASE("an all-dirty set forces a blocking victim writeback") {
  Harness h;
  PageCache cache(one_set(3), h.hooks());
  for (std::uint64_t p = 0; p < 3; ++p)
    cache.access(p, true, false, 0, p + 1, [](SimTime) {});
  cache.access(9, true, false, 0, 4, [](SimTime) {});
  CHECK(h.writebacks == 1);
  CHECK(h.last_writeback_page == 0);  // lowest distance score at hand 0
  CHECK(cache.victim_writebacks() == 1);
  CHECK_FALSE(cache.resident(0));
  CHECK(cache.resident(9));
}

TEST_CASE("mark_clean only applies to the matching dirty version") {
  Harness h;
  PageCache cache(one_set(4), h.hooks());
  cache.access(1, true, false, 0, 1, [](SimTime) {});
  const std::uint64_t v1 = cache.dirty_version(1);
  cache.access(1, true, false, 0, 2, [](SimTime) {});  // re-dirtied
  cache.mark_clean(1, v1);                             // stale snapshot
  CHECK(cache.is_dirty(1));
  cache.mark_clean(1, cache.dirty_version(1));
  CHECK_FALSE(cache.is_dirty(1));
  CHECK(cache.resident(1));
  CHECK(cache.data_tag(1) == 2);
}

TEST_CASE("flush-pending pages are withheld from reselection") {
  Harness h;
  PageCache cache(one_set(4), h.hooks());
  for (std::uint64_t p = 0; p < 4; ++p)
    cache.access(p, true, false, 0, p + 1, [](SimTime) {});
  auto first = cache.select_flush_candidates(0, 2, 0);
  REQUIRE(first.size() == 2);
  auto second = cache.select_flush_candidates(0, 4, 0);
  CHECK(second.size() == 2);  // the two pending pages are excluded
  for (const auto& a : first)
    for (const auto& b : second) CHECK(a.page != b.page);
  cache.clear_flush_pending(first[0].page);
  CHECK(cache.select_flush_candidates(0, 4, 0).size() == 1);
}

TEST_CASE("selection stops below the score bar") {
  Harness h;
  PageCache cache(one_set(6), h.hooks());
  for (std::uint64_t p = 0; p < 6; ++p)
    cache.access(p, true, false, 0, p + 1, [](SimTime) {});
  // Six residents: scores 5..0. A bar of 4 admits only the top two.
  auto got = cache.select_flush_candidates(0, 6, 4);
  CHECK(got.size() == 2);
  CHECK(got[0].flush_score == 5);
  CHECK(got[1].flush_score == 4);
  CHECK_FALSE(cache.has_flushable(0, 4));  // the rest score below the bar
  CHECK(cache.has_flushable(0, 3));
}

TEST_CASE("flush_rank orders pages by eviction closeness") {
  Harness h;
  PageCache cache(one_set(4), h.hooks());
  for (std::uint64_t p = 0; p < 4; ++p)
    cache.access(p, true, false, 0, p + 1, [](SimTime) {});
  cache.access(0, false, false, 0, 0, [](SimTime) {});  // extra hit for page 0
  // Page 1 is now closest to eviction (lowest hits, nearest the hand).
  CHECK(cache.flush_rank(1) == 3);
  CHECK(cache.flush_rank(0) < cache.flush_rank(1));
  CHECK_THROWS_AS(cache.flush_rank(77), InvariantError);
}

TEST_CASE("single-slot degenerate set still works") {
  Harness h;
  PageCache cache(one_set(1), h.hooks());
  cache.access(1, true, false, 0, 1, [](SimTime) {});
  cache.access(2, true, false, 0, 2, [](SimTime) {});  // evicts via writeback
  CHECK(h.writebacks == 1);
  CHECK(cache.resident(2));
  CHECK_FALSE(cache.resident(1));
}

TEST_CASE("config validation") {
  CacheConfig c = one_set(4);
  c.insert_hits = 99;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = one_set(4);
  c.cache_pages = 2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}
