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

#include <string>
#include <vector>

#include "ssdsim/cache.hpp"
#include "ssdsim/flusher.hpp"
#include "ssdsim/queues.hpp"
#include "ssdsim/ssd.hpp"
#include "ssdsim/workload.hpp"

namespace ssdsim {

enum class ExperimentKind : std::uint8_t {
  Single,         // one run of the configured workload
  FlusherAb,      // paired run: flusher on vs. off, same seed
  OccupancySweep, // single-device write IOPS across occupancies
  ArrayScale,     // per-SSD IOPS across array sizes
  ParallelSweep,  // array IOPS vs. offered parallelism, uniform and zipfian
  MixedSweep,     // flusher A/B across read fractions
  WritebackTable, // extra-writeback + hit-rate table across read fractions
};

/// Everything one run (or sweep) needs. Flat `key = value` files and
/// `--override` strings populate it; see README for the key list.
struct RunConfig {
  std::uint32_t num_ssds = 1;
  std::uint64_t seed = 1;
  double occupancy = 0.8;  // live-data fraction of logical capacity
  std::uint32_t stripe_unit = 4096;

  SsdConfig ssd;
  CacheConfig cache;      // cache.pages = 0 -> footprint / 8
  bool cache_bypass = false;
  QueueConfig queue;
  FlusherConfig flusher;
  WorkloadSpec workload;  // footprint_pages = 0 -> occupancy * capacity

  double warmup_fraction = 0.10;
  double tail_fraction = 0.05;  // drain tail excluded from the IOPS window
  double precondition_overwrites = 1.0;  // multiples of the footprint
  ExperimentKind experiment = ExperimentKind::Single;

  std::vector<double> sweep_occupancies{0.4, 0.6, 0.8};
  std::vector<std::uint32_t> sweep_ssds{6, 12, 18};
  std::vector<std::uint64_t> sweep_parallelism{576, 2304, 9216, 36864};
  std::vector<double> sweep_read_fractions{0.0, 0.2, 0.4, 0.6, 0.8};

  void validate() const;

  /// Array-wide logical capacity in pages.
  std::uint64_t capacity_pages() const;
  /// Footprint after applying the auto default.
  std::uint64_t effective_footprint() const;
  /// Cache size after applying the auto default.
  std::uint64_t effective_cache_pages() const;

  /// Stable digest of the fields that shape the request stream; used to pair
  /// A/B runs.
  std::string workload_fingerprint() const;
};

/// Applies one `key = value` assignment. Unknown keys and malformed values
/// throw ConfigError naming the key.
void apply_key(RunConfig& cfg, const std::string& key,
               const std::string& value);

/// Parses flat config text (one assignment per line, `#` comments). Errors
/// carry the line number.
void apply_config_text(RunConfig& cfg, const std::string& text,
                       const std::string& origin);

void apply_config_file(RunConfig& cfg, const std::string& path);

/// Applies a single `key=value` override string.
void apply_override(RunConfig& cfg, const std::string& assignment);

std::string to_string(ExperimentKind k);

}  // namespace ssdsim
