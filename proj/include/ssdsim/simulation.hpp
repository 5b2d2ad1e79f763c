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

#include <memory>
#include <optional>
#include <vector>

#include "ssdsim/cache.hpp"
#include "ssdsim/config.hpp"
#include "ssdsim/engine.hpp"
#include "ssdsim/flusher.hpp"
#include "ssdsim/mapping.hpp"
#include "ssdsim/metrics.hpp"
#include "ssdsim/queues.hpp"
#include "ssdsim/ssd.hpp"
#include "ssdsim/workload.hpp"

namespace ssdsim {

/// Owns one end-to-end run: devices, per-SSD dual queues, page cache,
/// flusher, and the workload driver, all on a single event engine.
class Simulation {
 public:
  explicit Simulation(const RunConfig& cfg);

  /// Preconditions the devices, drives the workload to completion, and
  /// returns the collected metrics.
  RunMetrics run();

  Engine& engine() { return engine_; }
  PageCache* cache() { return cache_ ? &*cache_ : nullptr; }
  SsdDevice& device(std::uint32_t i) { return *devices_[i]; }
  const ArrayLayout& layout() const { return layout_; }

  /// Replay check: in an idle simulation, every acknowledged write must be
  /// recoverable from cache contents or device state. Returns the number of
  /// pages whose latest acknowledged tag is not found (0 = sound).
  std::uint64_t shadow_divergences() const;

 private:
  bool submit_app(const AppOp& op, std::function<void(SimTime)> done);
  bool submit_bypass(const AppOp& op, std::function<void(SimTime)> done);
  void submit_high(std::uint32_t ssd, IoRequest req);
  void drain_overflow();
  void schedule_space_event();
  void precondition();

  RunConfig cfg_;
  ArrayLayout layout_;
  Engine engine_;
  std::vector<std::unique_ptr<SsdDevice>> devices_;
  std::vector<std::unique_ptr<DualQueue>> queues_;
  std::optional<PageCache> cache_;
  std::optional<Flusher> flusher_;
  std::optional<Driver> driver_;

  std::vector<std::deque<IoRequest>> overflow_;  // high-queue spill, per SSD
  bool space_event_pending_ = false;
  std::uint64_t next_tag_ = 0;
  std::vector<std::uint64_t> acked_tag_;  // latest acknowledged tag per page

  std::uint64_t warmup_ops_ = 0;
  std::uint64_t measure_end_ops_ = 0;
  std::uint64_t completed_ops_ = 0;
  SimTime measure_start_ = 0;
  SimTime measure_end_ = 0;
  std::uint64_t completions_since_sample_ = 0;
  RunMetrics metrics_;
};

}  // namespace ssdsim
