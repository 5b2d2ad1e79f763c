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
#include "ssdsim/ssd.hpp"

#include <algorithm>
#include <queue>

namespace ssdsim {

void SsdConfig::validate() const {
  if (page_size == 0) throw ConfigError("ssd: page_size must be > 0");
  if (pages_per_block == 0) throw ConfigError("ssd: pages_per_block must be > 0");
  if (physical_blocks < 4) throw ConfigError("ssd: physical_blocks must be >= 4");
  if (!(over_provision > 0.0 && over_provision < 1.0))
    throw ConfigError("ssd: over_provision must be in (0,1)");
  if (!(gc_low_watermark < gc_high_watermark && gc_high_watermark < 1.0))
    throw ConfigError("ssd: need gc_low_watermark < gc_high_watermark < 1");
  if (max_outstanding == 0) throw ConfigError("ssd: max_outstanding must be > 0");
  if (write_service_us == 0) throw ConfigError("ssd: write_service_us must be > 0");
  if (service_jitter < 0.0 || service_jitter >= 1.0)
    throw ConfigError("ssd: service_jitter must be in [0,1)");
}

SsdDevice::SsdDevice(const SsdConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), rng_(seed) {
  cfg_.validate();
  l2p_.assign(cfg_.logical_pages(), kNone);
  p2l_.assign(cfg_.physical_pages(), kNone);
  valid_count_.assign(cfg_.physical_blocks, 0);
  is_free_.assign(cfg_.physical_blocks, 1);
  tag_.assign(cfg_.logical_pages(), 0);
  for (std::uint32_t b = 0; b < cfg_.physical_blocks; ++b) free_list_.push_back(b);
  unit_free_.assign(cfg_.max_outstanding, 0);
}

SimTime SsdDevice::jittered(SimTime base) {
  if (cfg_.service_jitter == 0.0) return base;
  std::uniform_real_distribution<double> d(-cfg_.service_jitter,
                                           cfg_.service_jitter);
  const double t = static_cast<double>(base) * (1.0 + d(rng_));
  return t < 1.0 ? 1 : static_cast<SimTime>(t);
}

SimTime SsdDevice::start_of_service(SimTime now) {
  SimTime start = std::max(now, gc_busy_until_);
  auto it = std::min_element(unit_free_.begin(), unit_free_.end());
  start = std::max(start, *it);
  return start;
}

SimTime SsdDevice::submit_read(SimTime now) {
  SSDSIM_CHECK(can_accept(), "ssd: submit beyond max_outstanding");
  ++in_flight_;
  ++stats_.reads;
  const SimTime start = start_of_service(now);
  const SimTime dur = jittered(cfg_.read_service_us);
  auto it = std::min_element(unit_free_.begin(), unit_free_.end());
  *it = start + dur;
  stats_.service_time_us += dur;
  return start + dur;
}

SimTime SsdDevice::submit_write(SimTime now, std::uint64_t lpage,
                                std::uint64_t tag) {
  SSDSIM_CHECK(can_accept(), "ssd: submit beyond max_outstanding");
  ++in_flight_;
  ++stats_.writes;
  host_write(lpage, tag);
  maybe_run_gc(now, /*timed=*/true);
  const SimTime start = start_of_service(now);
  const SimTime dur = jittered(cfg_.write_service_us);
  auto it = std::min_element(unit_free_.begin(), unit_free_.end());
  *it = start + dur;
  stats_.service_time_us += dur;
  return start + dur;
}

void SsdDevice::complete() {
  SSDSIM_CHECK(in_flight_ > 0, "ssd: completion without submission");
  --in_flight_;
}

void SsdDevice::write_untimed(std::uint64_t lpage, std::uint64_t tag) {
  host_write(lpage, tag);
  maybe_run_gc(0, /*timed=*/false);
}

std::uint32_t SsdDevice::alloc_page() {
  const std::uint32_t ppb = cfg_.pages_per_block;
  if (frontier_block_ == kNone || frontier_next_ == ppb) {
    SSDSIM_CHECK(!free_list_.empty(), "ssd: out of free blocks");
    frontier_block_ = free_list_.front();
    free_list_.pop_front();
    is_free_[frontier_block_] = 0;
    frontier_next_ = 0;
  }
  return frontier_block_ * ppb + frontier_next_++;
}

void SsdDevice::host_write(std::uint64_t lpage, std::uint64_t tag) {
  SSDSIM_CHECK(lpage < l2p_.size(), "ssd: logical page out of range");
  const std::uint32_t old = l2p_[lpage];
  if (old != kNone) {
    p2l_[old] = kNone;
    --valid_count_[old / cfg_.pages_per_block];
  }
  const std::uint32_t np = alloc_page();
  l2p_[lpage] = np;
  p2l_[np] = static_cast<std::uint32_t>(lpage);
  ++valid_count_[np / cfg_.pages_per_block];
  tag_[lpage] = tag;
}

std::uint32_t SsdDevice::pick_victim() const {
  std::uint32_t best = kNone;
  std::uint16_t best_valid = 0;
  for (std::uint32_t b = 0; b < cfg_.physical_blocks; ++b) {
    if (is_free_[b] || b == frontier_block_) continue;
    if (best == kNone || valid_count_[b] < best_valid) {
      best = b;
      best_valid = valid_count_[b];
    }
  }
  return best;
}

SimTime SsdDevice::reclaim_one_block() {
  const std::uint32_t ppb = cfg_.pages_per_block;
  const std::uint32_t victim = pick_victim();
  SSDSIM_CHECK(victim != kNone, "ssd: gc found no victim block");
  SSDSIM_CHECK(valid_count_[victim] < ppb,
               "ssd: gc victim fully valid, no reclaimable space");
  std::uint32_t moved = 0;
  for (std::uint32_t i = 0; i < ppb; ++i) {
    const std::uint32_t pp = victim * ppb + i;
    const std::uint32_t lp = p2l_[pp];
    if (lp == kNone) continue;
    p2l_[pp] = kNone;
    --valid_count_[victim];
    const std::uint32_t np = alloc_page();
    l2p_[lp] = np;
    p2l_[np] = lp;
    ++valid_count_[np / ppb];
    ++moved;
  }
  stats_.gc_copies += moved;
  ++stats_.gc_erases;
  free_list_.push_back(victim);
  is_free_[victim] = 1;
  return static_cast<SimTime>(moved) * cfg_.copy_page_us + cfg_.erase_us;
}

void SsdDevice::maybe_run_gc(SimTime now, bool timed) {
  if (!cfg_.gc_enabled) return;
  const double low = cfg_.gc_low_watermark * cfg_.physical_blocks;
  const double high = cfg_.gc_high_watermark * cfg_.physical_blocks;

  if (!timed) {
    // Preconditioning path: reclaim in one shot with no time accounting.
    if (static_cast<double>(free_list_.size()) >= low) return;
    while (static_cast<double>(free_list_.size()) < high) reclaim_one_block();
    return;
  }

  // Hysteresis: dropping below the low watermark starts a reclaim phase that
  // frees one block per host write until the high watermark is restored.
  // Each reclaimed block suspends service for its copy+erase window, so the
  // host sees many short stalls instead of one long one.
  if (!gc_active_) {
    if (static_cast<double>(free_list_.size()) >= low) return;
    gc_active_ = true;
    ++stats_.gc_activations;
    if (stats_.gc_activations == 1) stats_.first_gc_at = now;
  }
  const SimTime window = reclaim_one_block();
  stats_.gc_time_us += window;
  gc_busy_until_ = std::max(gc_busy_until_, now) + window;
  if (static_cast<double>(free_list_.size()) >= high) gc_active_ = false;
}

double steady_state_iops(const SsdConfig& cfg, double occupancy,
                         const SteadyStateOptions& opt) {
  cfg.validate();
  if (!(occupancy > 0.0 && occupancy < 1.0))
    throw ConfigError("steady_state_iops: occupancy must be in (0,1)");

  SsdDevice dev(cfg, opt.seed);
  const std::uint64_t footprint = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(occupancy * cfg.logical_pages()));
  std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ull);

  for (std::uint64_t p = 0; p < footprint; ++p) dev.write_untimed(p, 0);
  const std::uint64_t overwrites =
      static_cast<std::uint64_t>(opt.precondition_overwrites * footprint);
  std::uniform_int_distribution<std::uint64_t> uni(0, footprint - 1);
  for (std::uint64_t i = 0; i < overwrites; ++i)
    dev.write_untimed(uni(rng), 0);

  auto draw = [&]() -> std::uint64_t {
    return opt.page_sampler ? opt.page_sampler(rng, footprint) : uni(rng);
  };

  // Saturate the device: keep max_outstanding writes in flight, submit the
  // next one whenever the earliest completion fires.
  std::priority_queue<SimTime, std::vector<SimTime>, std::greater<SimTime>> pend;
  for (std::uint32_t i = 0; i < cfg.max_outstanding; ++i)
    pend.push(dev.submit_write(0, draw(), 0));

  const std::uint64_t total = opt.warmup_ops + opt.measure_ops;
  SimTime t_warm = 0, t_end = 0;
  for (std::uint64_t done = 0; done < total; ++done) {
    const SimTime now = pend.top();
    pend.pop();
    dev.complete();
    if (done + 1 == opt.warmup_ops) t_warm = now;
    if (done + 1 == total) {
      t_end = now;
      break;
    }
    pend.push(dev.submit_write(now, draw(), 0));
  }
  SSDSIM_CHECK(t_end > t_warm, "steady_state_iops: degenerate measurement window");
  return static_cast<double>(opt.measure_ops) * 1e6 /
         static_cast<double>(t_end - t_warm);
}

}  // namespace ssdsim
