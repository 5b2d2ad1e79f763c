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
#include <vector>

#include "ssdsim/cache.hpp"
#include "ssdsim/queues.hpp"

namespace ssdsim {

struct FlusherConfig {
  bool enabled = true;
  int dirty_threshold = 6;      // pending FIFO entry when dirty_count exceeds it
  int batch = 2;                // pages flushed per set per round (1 or 2)
  int min_score = 6;            // don't enqueue below the queue discard bar
  std::uint32_t cap_per_ssd = 2048;  // global outstanding cap = cap_per_ssd * N
  void validate() const;
};

/// Background dirty-page flusher. Triggered sets sit in a FIFO that is pumped
/// round-robin, `batch` highest-scored pages per set per round, until the
/// global cap or the low queues push back.
class Flusher {
 public:
  // enqueue_low returns false when the target SSD's low queue is full.
  Flusher(const FlusherConfig& cfg, PageCache& cache, std::uint32_t num_ssds,
          std::function<std::uint32_t(std::uint64_t page)> ssd_of_page,
          std::function<std::uint64_t(std::uint64_t page)> device_page_of,
          std::function<bool(std::uint32_t ssd, FlushRequest req)> enqueue_low);

  void on_page_dirtied(std::uint32_t set_id);
  void on_flush_event(const FlushRequest& req, bool completed,
                      std::optional<DiscardReason> reason);
  void pump();

  std::uint64_t outstanding() const { return outstanding_; }
  std::uint64_t global_cap() const { return cap_; }
  bool set_in_fifo(std::uint32_t set_id) const { return in_fifo_[set_id] != 0; }

  struct Stats {
    std::uint64_t issued = 0;
    std::uint64_t completed = 0;
    std::uint64_t discarded_evicted = 0;
    std::uint64_t discarded_cleaned = 0;
    std::uint64_t discarded_lowscore = 0;
    std::vector<std::uint64_t> issued_per_set;  // bias-property telemetry
  };
  const Stats& stats() const { return stats_; }

 private:
  FlusherConfig cfg_;
  PageCache& cache_;
  std::function<std::uint32_t(std::uint64_t)> ssd_of_page_;
  std::function<std::uint64_t(std::uint64_t)> device_page_of_;
  std::function<bool(std::uint32_t, FlushRequest)> enqueue_low_;
  std::deque<std::uint32_t> fifo_;
  std::vector<std::uint8_t> in_fifo_;
  std::uint64_t cap_ = 0;
  std::uint64_t outstanding_ = 0;
  bool pumping_ = false;
  bool repump_ = false;
  Stats stats_;
};

}  // namespace ssdsim
