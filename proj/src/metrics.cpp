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
#include "ssdsim/metrics.hpp"

#include <cstdio>
#include <numeric>
#include <sstream>

namespace ssdsim {

namespace {
std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}
}  // namespace

double RunMetrics::iops() const {
  if (measured_ops > 0 && measure_end_us > measure_start_us)
    return static_cast<double>(measured_ops) * 1e6 /
           static_cast<double>(measure_end_us - measure_start_us);
  if (app_ops_completed <= warmup_ops) return 0.0;
  if (virtual_duration_us <= measure_start_us) return 0.0;
  return static_cast<double>(app_ops_completed - warmup_ops) * 1e6 /
         static_cast<double>(virtual_duration_us - measure_start_us);
}

std::optional<double> RunMetrics::hit_rate() const {
  const std::uint64_t total = cache_hits + cache_misses;
  if (total == 0) return std::nullopt;
  return static_cast<double>(cache_hits) / static_cast<double>(total);
}

std::uint64_t RunMetrics::total_device_writes() const {
  return std::accumulate(ssd.begin(), ssd.end(), std::uint64_t{0},
                         [](std::uint64_t acc, const SsdRunStats& s) {
                           return acc + s.device_writes;
                         });
}

std::string RunMetrics::csv_header() {
  return "run_id,seed,app_ops_submitted,app_ops_completed,virtual_duration_us,"
         "measure_start_us,measure_end_us,warmup_ops,measured_ops,iops,"
         "cache_hits,cache_misses,hit_rate,"
         "flush_issued,flush_completed,flush_discarded_evicted,"
         "flush_discarded_cleaned,flush_discarded_lowscore,victim_writebacks,"
         "device_reads,device_writes,flush_writes,victim_writes,direct_writes,"
         "gc_activations,gc_time_us,truncated";
}

std::string RunMetrics::csv_row(const std::string& run_id) const {
  std::uint64_t reads = 0, writes = 0, fw = 0, vw = 0, dw = 0, gact = 0;
  SimTime gct = 0;
  for (const auto& s : ssd) {
    reads += s.device_reads;
    writes += s.device_writes;
    fw += s.flush_writes;
    vw += s.victim_writes;
    dw += s.direct_writes;
    gact += s.gc_activations;
    gct += s.gc_time_us;
  }
  std::ostringstream os;
  os << run_id << ',' << seed << ',' << app_ops_submitted << ','
     << app_ops_completed << ',' << virtual_duration_us << ','
     << measure_start_us << ',' << measure_end_us << ',' << warmup_ops << ','
     << measured_ops << ',' << fmt_double(iops())
     << ',' << cache_hits << ',' << cache_misses << ','
     << (hit_rate() ? fmt_double(*hit_rate()) : std::string())
     << ',' << flush_issued << ',' << flush_completed << ','
     << flush_discarded_evicted << ',' << flush_discarded_cleaned << ','
     << flush_discarded_lowscore << ',' << victim_writebacks << ',' << reads
     << ',' << writes << ',' << fw << ',' << vw << ',' << dw << ',' << gact
     << ',' << gct << ',' << (truncated ? 1 : 0);
  return os.str();
}

std::string RunMetrics::summary(const std::string& run_id) const {
  std::ostringstream os;
  os << "run " << run_id << " (seed " << seed << ")\n"
     << "  app ops: " << app_ops_completed << "/" << app_ops_submitted
     << " completed over " << virtual_duration_us << " us virtual\n"
     << "  iops (post-warmup): " << fmt_double(iops()) << "\n";
  if (hit_rate())
    os << "  cache hit rate: " << fmt_double(*hit_rate()) << " (" << cache_hits
       << " hits / " << cache_misses << " misses)\n";
  os << "  flush: issued " << flush_issued << ", completed " << flush_completed
     << ", discarded " << flush_discarded() << " (evicted "
     << flush_discarded_evicted << ", cleaned " << flush_discarded_cleaned
     << ", low-score " << flush_discarded_lowscore << ")\n"
     << "  victim writebacks: " << victim_writebacks << "\n";
  for (std::size_t i = 0; i < ssd.size(); ++i) {
    const auto& s = ssd[i];
    os << "  ssd" << i << ": reads " << s.device_reads << ", writes "
       << s.device_writes << " (flush " << s.flush_writes << ", victim "
       << s.victim_writes << ", direct " << s.direct_writes << "), gc "
       << s.gc_activations << "x/" << s.gc_time_us << " us, busy "
       << s.busy_time_us << " us\n";
  }
  return os.str();
}

double extra_writeback(const RunMetrics& with_flusher,
                       const RunMetrics& without_flusher) {
  if (with_flusher.workload_fingerprint != without_flusher.workload_fingerprint ||
      with_flusher.seed != without_flusher.seed)
    throw ConfigError("extra_writeback: runs are not a matched pair");
  const double base = static_cast<double>(without_flusher.total_device_writes());
  if (base == 0.0) return 0.0;
  return (static_cast<double>(with_flusher.total_device_writes()) - base) / base;
}

std::string queue_samples_csv(const RunMetrics& m) {
  std::ostringstream os;
  os << "t_us,ssd,high_len,low_len,in_flight_high,in_flight_low\n";
  for (const auto& q : m.queue_samples)
    os << q.t << ',' << q.ssd << ',' << q.high_len << ',' << q.low_len << ','
       << q.in_flight_high << ',' << q.in_flight_low << '\n';
  return os.str();
}

}  // namespace ssdsim
