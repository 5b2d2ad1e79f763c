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
#include "ssdsim/simulation.hpp"

#include <limits>
#include <memory>

namespace ssdsim {

namespace {
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t h = seed ^ (salt * 0x9e3779b97f4a7c15ull);
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdull;
  h ^= h >> 33;
  return h;
}
}  // namespace

Simulation::Simulation(const RunConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  layout_.num_ssds = cfg_.num_ssds;
  layout_.page_size = cfg_.ssd.page_size;
  layout_.stripe_unit = cfg_.stripe_unit;
  layout_.total_pages = cfg_.capacity_pages();
  layout_.validate();

  metrics_.ssd.resize(cfg_.num_ssds);
  overflow_.resize(cfg_.num_ssds);

  for (std::uint32_t i = 0; i < cfg_.num_ssds; ++i)
    devices_.push_back(
        std::make_unique<SsdDevice>(cfg_.ssd, mix_seed(cfg_.seed, i + 1)));

  FlushQueueView view;
  view.resident = [this](std::uint64_t p) {
    return cache_ && cache_->resident(p);
  };
  view.dirty = [this](std::uint64_t p) { return cache_->is_dirty(p); };
  view.dirty_version = [this](std::uint64_t p) {
    return cache_->dirty_version(p);
  };
  view.data_tag = [this](std::uint64_t p) { return cache_->data_tag(p); };
  view.flush_rank = [this](std::uint64_t p) { return cache_->flush_rank(p); };

  for (std::uint32_t i = 0; i < cfg_.num_ssds; ++i) {
    queues_.push_back(
        std::make_unique<DualQueue>(cfg_.queue, *devices_[i], engine_, view));
    DualQueue& q = *queues_[i];
    q.on_flush_complete = [this, i](const FlushRequest& req, SimTime) {
      ++metrics_.ssd[i].flush_writes;
      flusher_->on_flush_event(req, true, std::nullopt);
    };
    q.on_flush_discard = [this](const FlushRequest& req, DiscardReason r) {
      flusher_->on_flush_event(req, false, r);
    };
    q.on_high_space = [this] { schedule_space_event(); };
    q.on_device_completion = [this, i](SimTime t) {
      if (++completions_since_sample_ % 256 != 0) return;
      QueueSample s;
      s.t = t;
      s.ssd = i;
      s.high_len = static_cast<std::uint32_t>(queues_[i]->high_size());
      s.low_len = static_cast<std::uint32_t>(queues_[i]->low_size());
      s.in_flight_high = queues_[i]->in_flight_high();
      s.in_flight_low = queues_[i]->in_flight_low();
      metrics_.queue_samples.push_back(s);
    };
  }

  if (!cfg_.cache_bypass) {
    CacheConfig ccfg = cfg_.cache;
    ccfg.cache_pages = cfg_.effective_cache_pages();
    CacheHooks hooks;
    hooks.issue_fill_read = [this](std::uint64_t page,
                                   std::function<void(SimTime, std::uint64_t)>
                                       cb) {
      const std::uint32_t ssd = ssd_of_page(layout_, page);
      const std::uint64_t dpage = device_page_of(layout_, page);
      IoRequest req;
      req.device_page = dpage;
      req.is_write = false;
      req.origin = IoOrigin::CacheFill;
      req.on_complete = [this, ssd, dpage, cb = std::move(cb)](SimTime t) {
        cb(t, devices_[ssd]->content_tag(dpage));
      };
      submit_high(ssd, std::move(req));
    };
    hooks.issue_victim_write = [this](std::uint64_t page, std::uint64_t tag,
                                      std::function<void(SimTime)> cb) {
      const std::uint32_t ssd = ssd_of_page(layout_, page);
      IoRequest req;
      req.device_page = device_page_of(layout_, page);
      req.is_write = true;
      req.origin = IoOrigin::VictimWriteback;
      req.tag = tag;
      req.on_complete = std::move(cb);
      ++metrics_.ssd[ssd].victim_writes;
      submit_high(ssd, std::move(req));
    };
    hooks.page_dirtied = [this](std::uint32_t set_id) {
      if (flusher_) flusher_->on_page_dirtied(set_id);
    };
    hooks.defer = [this](std::function<void(SimTime)> fn) {
      engine_.schedule(engine_.now(), EventKind::FlusherPump,
                       [this, fn = std::move(fn)] { fn(engine_.now()); });
    };
    cache_.emplace(ccfg, std::move(hooks));

    if (cfg_.flusher.enabled) {
      flusher_.emplace(
          cfg_.flusher, *cache_, cfg_.num_ssds,
          [this](std::uint64_t p) { return ssd_of_page(layout_, p); },
          [this](std::uint64_t p) { return device_page_of(layout_, p); },
          [this](std::uint32_t ssd, FlushRequest req) {
            return queues_[ssd]->enqueue_low(std::move(req));
          });
    }
  }

  acked_tag_.assign(cfg_.effective_footprint(), 0);

  WorkloadSpec w = cfg_.workload;
  w.footprint_pages = cfg_.effective_footprint();
  w.seed = cfg_.seed;
  const std::uint32_t depth =
      w.issue == IssueModel::Sync
          ? w.sync_threads
          : w.depth_per_ssd * cfg_.num_ssds;
  auto submit = [this](const AppOp& op, std::function<void(SimTime)> done) {
    return cfg_.cache_bypass ? submit_bypass(op, std::move(done))
                             : submit_app(op, std::move(done));
  };
  driver_.emplace(w, layout_.page_size, depth, std::move(submit));
  driver_->on_op_complete = [this](SimTime t) {
    ++completed_ops_;
    if (completed_ops_ == warmup_ops_) measure_start_ = t;
    if (completed_ops_ == measure_end_ops_) measure_end_ = t;
  };
}

void Simulation::submit_high(std::uint32_t ssd, IoRequest req) {
  if (overflow_[ssd].empty() && queues_[ssd]->high_has_space()) {
    const bool ok = queues_[ssd]->enqueue_high(std::move(req));
    SSDSIM_CHECK(ok, "simulation: rejected despite free high-queue space");
    return;
  }
  overflow_[ssd].push_back(std::move(req));
}

void Simulation::drain_overflow() {
  for (std::uint32_t i = 0; i < cfg_.num_ssds; ++i) {
    while (!overflow_[i].empty() && queues_[i]->high_has_space()) {
      IoRequest req = std::move(overflow_[i].front());
      overflow_[i].pop_front();
      const bool ok = queues_[i]->enqueue_high(std::move(req));
      SSDSIM_CHECK(ok, "simulation: overflow drain into full queue");
    }
  }
}

void Simulation::schedule_space_event() {
  if (space_event_pending_) return;
  space_event_pending_ = true;
  engine_.schedule(engine_.now(), EventKind::RequestArrival, [this] {
    space_event_pending_ = false;
    drain_overflow();
    if (driver_) driver_->notify_space();
  });
}

bool Simulation::submit_app(const AppOp& op,
                            std::function<void(SimTime)> done) {
  auto subs = split(layout_, op.offset, op.size);
  struct Join {
    std::size_t remaining;
    SimTime latest = 0;
    std::function<void(SimTime)> done;
  };
  auto join = std::make_shared<Join>();
  join->remaining = subs.size();
  join->done = std::move(done);
  for (const SubRequest& sub : subs) {
    auto on_sub = [this, join, page = sub.page, is_write = !op.is_read,
                   tag = op.is_read ? 0 : ++next_tag_](SimTime t) mutable {
      (void)this;
      if (is_write && tag > acked_tag_[page]) acked_tag_[page] = tag;
      join->latest = std::max(join->latest, t);
      if (--join->remaining == 0) join->done(join->latest);
    };
    if (op.is_read) {
      cache_->access(sub.page, false, false, engine_.now(), 0,
                     std::move(on_sub));
    } else {
      // Reuse the tag captured by the completion callback.
      const std::uint64_t tag = next_tag_;
      cache_->access(sub.page, true, sub.partial, engine_.now(), tag,
                     std::move(on_sub));
    }
  }
  return true;
}

bool Simulation::submit_bypass(const AppOp& op,
                               std::function<void(SimTime)> done) {
  auto subs = split(layout_, op.offset, op.size);
  if (subs.size() != 1 || subs[0].partial)
    throw ConfigError(
        "cache.bypass requires page-aligned single-page operations");
  const SubRequest& sub = subs[0];
  IoRequest req;
  req.device_page = sub.device_page;
  req.is_write = !op.is_read;
  req.origin = op.is_read ? IoOrigin::AppRead : IoOrigin::AppWrite;
  if (req.is_write) req.tag = ++next_tag_;
  req.on_complete = [this, done = std::move(done), page = sub.page,
                     tag = req.tag, is_write = req.is_write](SimTime t) {
    if (is_write && tag > acked_tag_[page]) acked_tag_[page] = tag;
    done(t);
  };
  const bool is_write = req.is_write;
  if (!queues_[sub.ssd]->high_has_space()) return false;
  const bool ok = queues_[sub.ssd]->enqueue_high(std::move(req));
  SSDSIM_CHECK(ok, "simulation: rejected despite free high-queue space");
  if (is_write) ++metrics_.ssd[sub.ssd].direct_writes;
  return true;
}

void Simulation::precondition() {
  const std::uint64_t footprint = cfg_.effective_footprint();
  for (std::uint64_t p = 0; p < footprint; ++p) {
    const std::uint64_t tag = ++next_tag_;
    devices_[ssd_of_page(layout_, p)]->write_untimed(device_page_of(layout_, p),
                                                     tag);
    acked_tag_[p] = tag;
  }
  const std::uint64_t overwrites = static_cast<std::uint64_t>(
      cfg_.precondition_overwrites * static_cast<double>(footprint));
  std::mt19937_64 rng(mix_seed(cfg_.seed, 0xfeedfaceull));
  std::uniform_int_distribution<std::uint64_t> d(0, footprint - 1);
  for (std::uint64_t i = 0; i < overwrites; ++i) {
    const std::uint64_t p = d(rng);
    const std::uint64_t tag = ++next_tag_;
    devices_[ssd_of_page(layout_, p)]->write_untimed(device_page_of(layout_, p),
                                                     tag);
    acked_tag_[p] = tag;
  }
}

RunMetrics Simulation::run() {
  precondition();
  warmup_ops_ = static_cast<std::uint64_t>(
      cfg_.warmup_fraction * static_cast<double>(cfg_.workload.total_ops));
  measure_end_ops_ = cfg_.workload.total_ops -
                     static_cast<std::uint64_t>(
                         cfg_.tail_fraction *
                         static_cast<double>(cfg_.workload.total_ops));
  engine_.schedule(0, EventKind::WorkloadTick, [this] { driver_->start(); });
  engine_.run(std::numeric_limits<SimTime>::max());
  SSDSIM_CHECK(driver_->finished(), "simulation: event queue drained early");

  metrics_.workload_fingerprint = cfg_.workload_fingerprint();
  metrics_.seed = cfg_.seed;
  metrics_.app_ops_submitted = driver_->issued();
  metrics_.app_ops_completed = driver_->completed();
  metrics_.virtual_duration_us = engine_.now();
  metrics_.measure_start_us = measure_start_;
  metrics_.measure_end_us = measure_end_;
  metrics_.warmup_ops = warmup_ops_;
  metrics_.measured_ops =
      measure_end_ops_ > warmup_ops_ ? measure_end_ops_ - warmup_ops_ : 0;
  metrics_.engine_events = engine_.events_processed();
  for (std::uint32_t i = 0; i < cfg_.num_ssds; ++i) {
    const auto& st = devices_[i]->stats();
    auto& m = metrics_.ssd[i];
    m.device_reads = st.reads;
    m.device_writes = st.writes;
    m.gc_activations = st.gc_activations;
    m.gc_time_us = st.gc_time_us;
    m.busy_time_us = std::min<SimTime>(st.service_time_us, engine_.now());
    m.first_gc_at = st.first_gc_at;
  }
  if (cache_) {
    metrics_.cache_hits = cache_->hits();
    metrics_.cache_misses = cache_->misses();
    metrics_.victim_writebacks = cache_->victim_writebacks();
  }
  if (flusher_) {
    const auto& fs = flusher_->stats();
    metrics_.flush_issued = fs.issued;
    metrics_.flush_completed = fs.completed;
    metrics_.flush_discarded_evicted = fs.discarded_evicted;
    metrics_.flush_discarded_cleaned = fs.discarded_cleaned;
    metrics_.flush_discarded_lowscore = fs.discarded_lowscore;
  }
  return metrics_;
}

std::uint64_t Simulation::shadow_divergences() const {
  std::uint64_t diverged = 0;
  for (std::uint64_t p = 0; p < acked_tag_.size(); ++p) {
    const std::uint64_t want = acked_tag_[p];
    if (want == 0) continue;
    if (cache_ && cache_->resident(p) && cache_->data_tag(p) >= want) continue;
    const std::uint32_t ssd = ssd_of_page(layout_, p);
    if (devices_[ssd]->content_tag(device_page_of(layout_, p)) >= want)
      continue;
    ++diverged;
  }
  return diverged;
}

}  // namespace ssdsim
