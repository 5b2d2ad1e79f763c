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
#include <optional>
#include <string>
#include <vector>

#include "ssdsim/common.hpp"

namespace ssdsim {

struct SsdRunStats {
  std::uint64_t device_reads = 0;
  std::uint64_t device_writes = 0;
  std::uint64_t flush_writes = 0;    // via the low queue
  std::uint64_t victim_writes = 0;   // blocking writebacks via the high queue
  std::uint64_t direct_writes = 0;   // cache-bypass application writes
  std::uint64_t gc_activations = 0;
  SimTime gc_time_us = 0;
  SimTime busy_time_us = 0;  // capped at run duration
  SimTime first_gc_at = 0;
};

struct QueueSample {
  SimTime t = 0;
  std::uint32_t ssd = 0;
  std::uint32_t high_len = 0;
  std::uint32_t low_len = 0;
  std::uint32_t in_flight_high = 0;
  std::uint32_t in_flight_low = 0;
};

struct RunMetrics {
  std::string workload_fingerprint;  // identical across a paired A/B run
  std::uint64_t seed = 0;
  std::uint64_t app_ops_submitted = 0;
  std::uint64_t app_ops_completed = 0;
  SimTime virtual_duration_us = 0;
  SimTime measure_start_us = 0;  // end of the warmup window
  SimTime measure_end_us = 0;    // start of the excluded drain tail
  std::uint64_t warmup_ops = 0;
  std::uint64_t measured_ops = 0;  // completions inside the window
  bool truncated = false;  // hit the virtual-time cap before finishing

  std::vector<SsdRunStats> ssd;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t flush_issued = 0;
  std::uint64_t flush_completed = 0;
  std::uint64_t flush_discarded_evicted = 0;
  std::uint64_t flush_discarded_cleaned = 0;
  std::uint64_t flush_discarded_lowscore = 0;
  std::uint64_t victim_writebacks = 0;
  std::uint64_t engine_events = 0;
  std::vector<QueueSample> queue_samples;

  /// Steady-state application IOPS with the warmup window excluded.
  double iops() const;
  std::optional<double> hit_rate() const;
  std::uint64_t total_device_writes() const;
  std::uint64_t flush_discarded() const {
    return flush_discarded_evicted + flush_discarded_cleaned +
           flush_discarded_lowscore;
  }

  static std::string csv_header();
  std::string csv_row(const std::string& run_id) const;
  std::string summary(const std::string& run_id) const;
};

/// Fraction of additional device writes the flusher run incurred over the
/// paired baseline run. Both runs must share workload spec and seed.
double extra_writeback(const RunMetrics& with_flusher,
                       const RunMetrics& without_flusher);

std::string queue_samples_csv(const RunMetrics& m);

}  // namespace ssdsim
