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

#include "ssdsim/common.hpp"
#include "ssdsim/engine.hpp"
#include "ssdsim/ssd.hpp"

namespace ssdsim {

struct QueueConfig {
  std::size_t high_capacity = 64;
  std::size_t low_capacity = 4096;
  std::uint32_t reserved_high_slots = 7;
  int discard_threshold = 6;  // drop flush requests ranked below this
  void validate(std::uint32_t max_outstanding) const;
};

enum class IoOrigin : std::uint8_t {
  AppRead,          // application read / read-update-write fill
  CacheFill,        // cache miss fill read
  VictimWriteback,  // blocking writeback of an evicted dirty page
  AppWrite,         // direct device write (cache bypass mode)
};

/// High-priority request: the application is blocked on it.
struct IoRequest {
  std::uint64_t device_page = 0;
  bool is_write = false;
  IoOrigin origin = IoOrigin::AppRead;
  SimTime submitted = 0;
  std::uint64_t tag = 0;
  std::function<void(SimTime)> on_complete;
};

/// Low-priority background flush of one dirty cache page.
struct FlushRequest {
  std::uint64_t page = 0;         // array-wide logical page
  std::uint64_t device_page = 0;  // device-local logical page
  std::uint32_t set_id = 0;
  std::uint64_t dirty_version = 0;
  std::uint64_t tag = 0;
  int score_at_enqueue = 0;
};

enum class DiscardReason : std::uint8_t { Evicted, Cleaned, LowScore };

/// Read-only cache probes used to judge a flush request at the queue head.
struct FlushQueueView {
  std::function<bool(std::uint64_t page)> resident;
  std::function<bool(std::uint64_t page)> dirty;
  std::function<std::uint64_t(std::uint64_t page)> dirty_version;
  std::function<std::uint64_t(std::uint64_t page)> data_tag;
  std::function<int(std::uint64_t page)> flush_rank;
};

/// Lazy staleness check, applied only when the request reaches the queue head.
std::optional<DiscardReason> discard_stale(const FlushRequest& req,
                                           const FlushQueueView& view,
                                           int threshold);

/// Per-SSD pair of bounded queues plus in-flight slot accounting. Low-priority
/// requests are issued only when the high queue is empty, and never into the
/// slots reserved for high-priority traffic.
class DualQueue {
 public:
  DualQueue(const QueueConfig& cfg, SsdDevice& dev, Engine& engine,
            FlushQueueView view);

  bool enqueue_high(IoRequest req);    // false = queue full (backpressure)
  bool enqueue_low(FlushRequest req);  // false = queue full (stop pumping)
  void dispatch();

  std::uint32_t in_flight_high() const { return in_flight_high_; }
  std::uint32_t in_flight_low() const { return in_flight_low_; }
  std::size_t high_size() const { return high_.size(); }
  std::size_t low_size() const { return low_.size(); }
  std::uint32_t low_slot_cap() const {
    return dev_.config().max_outstanding - cfg_.reserved_high_slots;
  }
  bool high_has_space() const { return high_.size() < cfg_.high_capacity; }

  // Wiring set by the simulation.
  std::function<void(const FlushRequest&, SimTime)> on_flush_complete;
  std::function<void(const FlushRequest&, DiscardReason)> on_flush_discard;
  std::function<void()> on_high_space;   // capacity freed in the high queue
  std::function<void(SimTime)> on_device_completion;  // telemetry hook

  void check_invariants() const;

 private:
  void issue_high(IoRequest req);
  void issue_low(FlushRequest req);

  QueueConfig cfg_;
  SsdDevice& dev_;
  Engine& engine_;
  FlushQueueView view_;
  std::deque<IoRequest> high_;
  std::deque<FlushRequest> low_;
  std::uint32_t in_flight_high_ = 0;
  std::uint32_t in_flight_low_ = 0;
};

}  // namespace ssdsim
