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
#include "ssdsim/queues.hpp"

namespace ssdsim {

void QueueConfig::validate(std::uint32_t max_outstanding) const {
  if (high_capacity == 0) throw ConfigError("queue: high_capacity must be > 0");
  if (low_capacity == 0) throw ConfigError("queue: low_capacity must be > 0");
  if (reserved_high_slots >= max_outstanding)
    throw ConfigError("queue: reserved_high_slots must be < max_outstanding");
  if (discard_threshold < 0)
    throw ConfigError("queue: discard_threshold must be >= 0");
}

std::optional<DiscardReason> discard_stale(const FlushRequest& req,
                                           const FlushQueueView& view,
                                           int threshold) {
  if (!view.resident(req.page)) return DiscardReason::Evicted;
  if (!view.dirty(req.page) || view.dirty_version(req.page) != req.dirty_version)
    return DiscardReason::Cleaned;
  if (view.flush_rank(req.page) < threshold) return DiscardReason::LowScore;
  return std::nullopt;
}

DualQueue::DualQueue(const QueueConfig& cfg, SsdDevice& dev, Engine& engine,
                     FlushQueueView view)
    : cfg_(cfg), dev_(dev), engine_(engine), view_(std::move(view)) {
  cfg_.validate(dev.config().max_outstanding);
}

bool DualQueue::enqueue_high(IoRequest req) {
  if (high_.size() >= cfg_.high_capacity) return false;
  req.submitted = engine_.now();
  high_.push_back(std::move(req));
  dispatch();
  return true;
}

bool DualQueue::enqueue_low(FlushRequest req) {
  if (low_.size() >= cfg_.low_capacity) return false;
  low_.push_back(std::move(req));
  dispatch();
  return true;
}

void DualQueue::dispatch() {
  const std::uint32_t max_out = dev_.config().max_outstanding;
  for (;;) {
    const std::uint32_t total = in_flight_high_ + in_flight_low_;
    if (!high_.empty() && total < max_out) {
      IoRequest req = std::move(high_.front());
      high_.pop_front();
      issue_high(std::move(req));
      if (on_high_space && high_has_space()) on_high_space();
      continue;
    }
    if (high_.empty() && !low_.empty() && in_flight_low_ < low_slot_cap() &&
        total < max_out) {
      FlushRequest req = std::move(low_.front());
      low_.pop_front();
      if (auto reason = discard_stale(req, view_, cfg_.discard_threshold)) {
        if (on_flush_discard) on_flush_discard(req, *reason);
        continue;
      }
      // Discard soundness: the page is dirty with an unchanged version.
      SSDSIM_CHECK(view_.dirty(req.page) &&
                       view_.dirty_version(req.page) == req.dirty_version,
                   "queue: issuing stale flush request");
      issue_low(std::move(req));
      continue;
    }
    break;
  }
  check_invariants();
  // Reservation rule: a waiting high request implies all slots are taken,
  // never that low traffic alone exhausted them.
  if (!high_.empty())
    SSDSIM_CHECK(in_flight_high_ + in_flight_low_ == max_out,
                 "queue: high request waiting with free permitted slots");
}

void DualQueue::issue_high(IoRequest req) {
  ++in_flight_high_;
  const SimTime now = engine_.now();
  const SimTime done = req.is_write
                           ? dev_.submit_write(now, req.device_page, req.tag)
                           : dev_.submit_read(now);
  engine_.schedule(done, EventKind::DeviceCompletion,
                   [this, req = std::move(req)]() {
                     dev_.complete();
                     --in_flight_high_;
                     if (req.on_complete) req.on_complete(engine_.now());
                     dispatch();
                     if (on_high_space && high_has_space()) on_high_space();
                     if (on_device_completion) on_device_completion(engine_.now());
                   });
}

void DualQueue::issue_low(FlushRequest req) {
  ++in_flight_low_;
  const SimTime now = engine_.now();
  const SimTime done = dev_.submit_write(now, req.device_page, req.tag);
  engine_.schedule(done, EventKind::DeviceCompletion,
                   [this, req = std::move(req)]() {
                     dev_.complete();
                     --in_flight_low_;
                     if (on_flush_complete) on_flush_complete(req, engine_.now());
                     dispatch();
                     if (on_device_completion) on_device_completion(engine_.now());
                   });
}

void DualQueue::check_invariants() const {
  const std::uint32_t max_out = dev_.config().max_outstanding;
  SSDSIM_CHECK(in_flight_high_ + in_flight_low_ <= max_out,
               "queue: in-flight total exceeds max_outstanding");
  SSDSIM_CHECK(in_flight_low_ <= low_slot_cap(),
               "queue: low-priority in-flight exceeds unreserved slots");
  SSDSIM_CHECK(high_.size() <= cfg_.high_capacity, "queue: high overflows");
  SSDSIM_CHECK(low_.size() <= cfg_.low_capacity, "queue: low overflows");
}

}  // namespace ssdsim
