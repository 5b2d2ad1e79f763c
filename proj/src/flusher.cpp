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
#include "ssdsim/flusher.hpp"

namespace ssdsim {

void FlusherConfig::validate() const {
  if (dirty_threshold < 0) throw ConfigError("flusher: dirty_threshold must be >= 0");
  if (batch < 1 || batch > 2) throw ConfigError("flusher: batch must be 1 or 2");
  if (min_score < 0) throw ConfigError("flusher: min_score must be >= 0");
  if (cap_per_ssd == 0) throw ConfigError("flusher: cap_per_ssd must be > 0");
}

Flusher::Flusher(const FlusherConfig& cfg, PageCache& cache,
                 std::uint32_t num_ssds,
                 std::function<std::uint32_t(std::uint64_t)> ssd_of_page,
                 std::function<std::uint64_t(std::uint64_t)> device_page_of,
                 std::function<bool(std::uint32_t, FlushRequest)> enqueue_low)
    : cfg_(cfg),
      cache_(cache),
      ssd_of_page_(std::move(ssd_of_page)),
      device_page_of_(std::move(device_page_of)),
      enqueue_low_(std::move(enqueue_low)) {
  cfg_.validate();
  cap_ = static_cast<std::uint64_t>(cfg_.cap_per_ssd) * num_ssds;
  in_fifo_.assign(cache_.num_sets(), 0);
  stats_.issued_per_set.assign(cache_.num_sets(), 0);
}

void Flusher::on_page_dirtied(std::uint32_t set_id) {
  if (!cfg_.enabled) return;
  if (cache_.dirty_count(set_id) > cfg_.dirty_threshold && !in_fifo_[set_id]) {
    in_fifo_[set_id] = 1;
    fifo_.push_back(set_id);
    pump();
  }
}

void Flusher::on_flush_event(const FlushRequest& req, bool completed,
                             std::optional<DiscardReason> reason) {
  SSDSIM_CHECK(outstanding_ > 0, "flusher: event without outstanding request");
  --outstanding_;
  if (completed) {
    ++stats_.completed;
    cache_.mark_clean(req.page, req.dirty_version);
  } else {
    switch (*reason) {
      case DiscardReason::Evicted: ++stats_.discarded_evicted; break;
      case DiscardReason::Cleaned: ++stats_.discarded_cleaned; break;
      case DiscardReason::LowScore: ++stats_.discarded_lowscore; break;
    }
  }
  cache_.clear_flush_pending(req.page);
  pump();
}

void Flusher::pump() {
  if (!cfg_.enabled) return;
  if (pumping_) {  // re-entered via enqueue_low -> dispatch -> discard
    repump_ = true;
    return;
  }
  pumping_ = true;
  do {
    repump_ = false;
    bool progressed = true;
    while (progressed && outstanding_ < cap_) {
      progressed = false;
      std::size_t rounds = fifo_.size();
      for (std::size_t i = 0; i < rounds && outstanding_ < cap_; ++i) {
        const std::uint32_t set_id = fifo_.front();
        fifo_.pop_front();
        auto cands =
            cache_.select_flush_candidates(set_id, cfg_.batch, cfg_.min_score);
        for (auto& c : cands) {
          if (outstanding_ >= cap_) {
            cache_.clear_flush_pending(c.page);
            continue;
          }
          FlushRequest req;
          req.page = c.page;
          req.device_page = device_page_of_(c.page);
          req.set_id = set_id;
          req.dirty_version = c.dirty_version;
          req.tag = c.tag;
          req.score_at_enqueue = c.flush_score;
          const std::uint32_t ssd = ssd_of_page_(c.page);
          // Count before enqueueing: the queue may synchronously discard
          // the request and signal on_flush_event from inside enqueue_low.
          ++outstanding_;
          ++stats_.issued;
          ++stats_.issued_per_set[set_id];
          if (enqueue_low_(ssd, std::move(req))) {
            progressed = true;
          } else {
            --outstanding_;
            --stats_.issued;
            --stats_.issued_per_set[set_id];
            cache_.clear_flush_pending(c.page);
          }
        }
        // Stop once the set is back at the dirty target; flushing further
        // just rewrites pages that are likely to be dirtied again.
        if (cache_.dirty_count(set_id) > cfg_.dirty_threshold &&
            cache_.has_flushable(set_id, cfg_.min_score)) {
          fifo_.push_back(set_id);
        } else {
          in_fifo_[set_id] = 0;
        }
      }
      SSDSIM_CHECK(outstanding_ <= cap_, "flusher: outstanding exceeds cap");
    }
  } while (repump_);
  pumping_ = false;
}

}  // namespace ssdsim
