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
#include <functional>
#include <queue>
#include <vector>

#include "ssdsim/common.hpp"

namespace ssdsim {

enum class EventKind : std::uint8_t {
  RequestArrival,
  DeviceCompletion,
  GcPhase,
  FlusherPump,
  WorkloadTick,
};

/// Single-threaded discrete-event loop. Events with equal fire time run in
/// scheduling order (seq tie-break), which makes whole runs deterministic.
class Engine {
 public:
  SimTime now() const { return now_; }

  void schedule(SimTime fire_at, EventKind kind, std::function<void()> fn) {
    if (fire_at < now_)
      throw SimError("schedule into the past: fire_at=" +
                     std::to_string(fire_at) + " now=" + std::to_string(now_));
    heap_.push(Event{fire_at, next_seq_++, kind, std::move(fn)});
  }

  /// Processes events in (fire_at, seq) order until the next event would fire
  /// after `until`, or the queue empties.
  void run(SimTime until) {
    while (!heap_.empty() && heap_.top().fire_at <= until) {
      Event ev = heap_.top();
      heap_.pop();
      now_ = ev.fire_at;
      ++processed_;
      ev.fn();
    }
  }

  bool empty() const { return heap_.empty(); }
  std::uint64_t events_processed() const { return processed_; }

 private:
  struct Event {
    SimTime fire_at;
    std::uint64_t seq;
    EventKind kind;
    std::function<void()> fn;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t processed_ = 0;
};

}  // namespace ssdsim
