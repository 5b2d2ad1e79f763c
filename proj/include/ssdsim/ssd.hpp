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
#include <random>
#include <vector>

#include "ssdsim/common.hpp"

namespace ssdsim {

struct SsdConfig {
  std::uint32_t page_size = 4096;
  std::uint32_t pages_per_block = 128;
  std::uint32_t physical_blocks = 256;
  double over_provision = 0.20;  // fraction of physical space hidden
  SimTime read_service_us = 120;
  SimTime write_service_us = 500;
  SimTime erase_us = 900;
  SimTime copy_page_us = 3;
  std::uint32_t max_outstanding = 32;
  double gc_low_watermark = 0.04;   // free-block fraction that starts GC
  double gc_high_watermark = 0.08;  // free-block fraction that stops GC
  double service_jitter = 0.0;      // +/- fraction of service time, 0 = off
  bool gc_enabled = true;

  std::uint64_t physical_pages() const {
    return static_cast<std::uint64_t>(physical_blocks) * pages_per_block;
  }
  std::uint64_t logical_pages() const {
    return static_cast<std::uint64_t>(physical_pages() *
                                      (1.0 - over_provision));
  }
  void validate() const;
};

/// Log-structured flash device with greedy garbage collection. While GC is
/// reclaiming, host service is suspended and queued requests start after the
/// reclaim window ends.
class SsdDevice {
 public:
  static constexpr std::uint32_t kNone = ~0u;

  SsdDevice(const SsdConfig& cfg, std::uint64_t seed);

  bool can_accept() const { return in_flight_ < cfg_.max_outstanding; }
  std::uint32_t in_flight() const { return in_flight_; }

  /// Schedules one page read; returns the virtual completion time.
  SimTime submit_read(SimTime now);
  /// Schedules one page write; may trigger a GC window that delays it.
  SimTime submit_write(SimTime now, std::uint64_t lpage, std::uint64_t tag);
  /// Releases the in-flight slot; call exactly once per submit at completion.
  void complete();

  /// FTL-only write with no service time, for preconditioning.
  void write_untimed(std::uint64_t lpage, std::uint64_t tag);

  bool mapped(std::uint64_t lpage) const { return l2p_[lpage] != kNone; }
  std::uint64_t content_tag(std::uint64_t lpage) const { return tag_[lpage]; }

  std::uint32_t free_blocks() const {
    return static_cast<std::uint32_t>(free_list_.size());
  }
  std::uint16_t valid_count(std::uint32_t block) const {
    return valid_count_[block];
  }
  SimTime gc_busy_until() const { return gc_busy_until_; }
  const SsdConfig& config() const { return cfg_; }

  struct Stats {
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;  // host page writes
    std::uint64_t gc_copies = 0;
    std::uint64_t gc_erases = 0;
    std::uint64_t gc_activations = 0;
    SimTime gc_time_us = 0;
    SimTime service_time_us = 0;  // summed per-request service durations
    SimTime first_gc_at = 0;      // virtual time of the first timed GC window
  };
  const Stats& stats() const { return stats_; }

 private:
  SimTime start_of_service(SimTime now);
  SimTime jittered(SimTime base);
  std::uint32_t alloc_page();
  void host_write(std::uint64_t lpage, std::uint64_t tag);
  void maybe_run_gc(SimTime now, bool timed);
  SimTime reclaim_one_block();
  std::uint32_t pick_victim() const;

  SsdConfig cfg_;
  std::vector<std::uint32_t> l2p_;           // logical -> physical page
  std::vector<std::uint32_t> p2l_;           // physical -> logical, kNone=invalid
  std::vector<std::uint16_t> valid_count_;   // per block
  std::vector<std::uint8_t> is_free_;        // per block
  std::deque<std::uint32_t> free_list_;
  std::vector<std::uint64_t> tag_;           // content version per logical page
  std::uint32_t frontier_block_ = kNone;
  std::uint32_t frontier_next_ = 0;
  std::vector<SimTime> unit_free_;  // per internal parallel unit
  SimTime gc_busy_until_ = 0;
  bool gc_active_ = false;
  std::uint32_t in_flight_ = 0;
  std::mt19937_64 rng_;
  Stats stats_;
};

struct SteadyStateOptions {
  std::uint64_t seed = 1;
  std::uint64_t warmup_ops = 20000;
  std::uint64_t measure_ops = 60000;
  double precondition_overwrites = 1.0;  // multiples of the footprint
  // Draws a page in [0, footprint); nullptr means uniform.
  std::function<std::uint64_t(std::mt19937_64&, std::uint64_t)> page_sampler;
};

/// Saturating single-device random-write measurement at the given occupancy
/// (fraction of logical capacity that holds live data). Throws ConfigError
/// for occupancy outside (0,1).
double steady_state_iops(const SsdConfig& cfg, double occupancy,
                         const SteadyStateOptions& opt = {});

}  // namespace ssdsim
