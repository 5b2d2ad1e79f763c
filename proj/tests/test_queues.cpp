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
#include "ssdsim/queues.hpp"

using namespace ssdsim;

namespace {
struct FakeTable {
  bool resident = true;
  bool dirty = true;
  std::uint64_t version = 1;
  int rank = 11;

  FlushQueueView view() {
    FlushQueueView v;
    v.resident = [this](std::uint64_t) { return resident; };
    v.dirty = [this](std::uint64_t) { return dirty; };
    v.dirty_version = [this](std::uint64_t) { return version; };
    v.data_tag = [this](std::uint64_t) { return std::uint64_t{0}; };
    v.flush_rank = [this](std::uint64_t) { return rank; };
    return v;
  }
};

FlushRequest req(std::uint64_t version) {
  FlushRequest r;
  r.page = 0;
  r.dirty_version = version;
  return r;
}
}  // namespace

TEST_CASE("stale flush requests are discarded for the right reason") {
  FakeTable t;
  const auto v = t.view();
  CHECK(discard_stale(req(1), v, 6) == std::nullopt);

  t.resident = false;
  CHECK(discard_stale(req(1), v, 6) == DiscardReason::Evicted);

  t.resident = true;
  t.dirty = false;
  CHECK(discard_stale(req(1), v, 6) == DiscardReason::Cleaned);

  t.dirty = true;
  t.version = 2;  // re-dirtied since the snapshot
  CHECK(discard_stale(req(1), v, 6) == DiscardReason::Cleaned);

  t.version = 1;
  t.rank = 5;  // drifted close to eviction
  CHECK(discard_stale(req(1), v, 6) == DiscardReason::LowScore);
  CHECK(discard_stale(req(1), v, 5) == std::nullopt);
  CHECK(discard_stale(req(1), v, 0) == std::nullopt);
}

TEST_CASE("queue config validation") {
  QueueConfig c;
  CHECK_NOTHROW(c.validate(32));
  c.reserved_high_slots = 32;
  CHECK_THROWS_AS(c.validate(32), ConfigError);
  c = QueueConfig{};
  c.high_capacity = 0;
  CHECK_THROWS_AS(c.validate(32), ConfigError);
}

TEST_CASE("low traffic never touches the reserved slots") {
  Engine eng;
  SsdConfig scfg;
  scfg.pages_per_block = 32;
  scfg.physical_blocks = 64;
  SsdDevice dev(scfg, 1);
  FakeTable t;
  QueueConfig qcfg;
  DualQueue q(qcfg, dev, eng, t.view());
  q.on_flush_complete = [](const FlushRequest&, SimTime) {};

  for (int i = 0; i < 40; ++i) {
    FlushRequest r;
    r.page = 0;
    r.device_page = static_cast<std::uint64_t>(i);
    r.dirty_version = 1;
    q.enqueue_low(std::move(r));
  }
  CHECK(q.in_flight_low() == q.low_slot_cap());
  CHECK(q.in_flight_low() == scfg.max_outstanding - qcfg.reserved_high_slots);

  // High-priority arrivals take the reserved slots immediately.
  int completed = 0;
  for (int i = 0; i < 10; ++i) {
    IoRequest io;
    io.device_page = static_cast<std::uint64_t>(i);
    io.on_complete = [&](SimTime) { ++completed; };
    q.enqueue_high(std::move(io));
  }
  CHECK(q.in_flight_high() == qcfg.reserved_high_slots);
  CHECK(q.in_flight_high() + q.in_flight_low() == scfg.max_outstanding);
  CHECK(q.high_size() == 3);  // the rest wait for completions

  eng.run(1000000);
  CHECK(completed == 10);
  CHECK(q.in_flight_high() + q.in_flight_low() == 0);
}

TEST_CASE("full queues push back") {
  Engine eng;
  SsdConfig scfg;
  scfg.pages_per_block = 32;
  scfg.physical_blocks = 64;
  SsdDevice dev(scfg, 1);
  FakeTable t;
  QueueConfig qcfg;
  qcfg.high_capacity = 2;
  qcfg.low_capacity = 3;
  DualQueue q(qcfg, dev, eng, t.view());
  q.on_flush_complete = [](const FlushRequest&, SimTime) {};

  // Saturate the device slots first so enqueues actually queue up.
  for (std::uint32_t i = 0; i < scfg.max_outstanding; ++i)
    CHECK(q.enqueue_high(IoRequest{}));
  CHECK(q.enqueue_high(IoRequest{}));
  CHECK(q.enqueue_high(IoRequest{}));
  CHECK_FALSE(q.enqueue_high(IoRequest{}));
  for (int i = 0; i < 3; ++i) CHECK(q.enqueue_low(req(1)));
  CHECK_FALSE(q.enqueue_low(req(1)));
}

TEST_CASE("random traffic upholds the queue invariants") {
  const auto res = oracles::queue_fuzz(200000, 17);
  CHECK(res.events >= 200000);
  CHECK(res.violations == 0);
  CHECK(res.flush_completed > 0);
  CHECK(res.flush_discarded > 0);
  CHECK(res.high_completed > 0);
}
