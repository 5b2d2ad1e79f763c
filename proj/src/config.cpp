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
#include "ssdsim/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ssdsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw ConfigError("config key '" + key + "': " + why);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    bad(key, "expected unsigned integer, got '" + v + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    bad(key, "expected number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad(key, "expected boolean, got '" + v + "'");
}

template <typename T, typename Fn>
std::vector<T> parse_list(const std::string& key, const std::string& v,
                          Fn parse_one) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) bad(key, "empty list element");
    out.push_back(parse_one(key, item));
  }
  if (out.empty()) bad(key, "expected a non-empty comma-separated list");
  return out;
}

}  // namespace

void apply_key(RunConfig& cfg, const std::string& key,
               const std::string& value) {
  const std::string v = trim(value);
  if (key == "num_ssds") {
    cfg.num_ssds = static_cast<std::uint32_t>(parse_u64(key, v));
  } else if (key == "seed") {
    cfg.seed = parse_u64(key, v);
  } else if (key == "occupancy") {
    cfg.occupancy = parse_double(key, v);
  } else if (key == "layout.stripe_unit") {
    cfg.stripe_unit = static_cast<std::uint32_t>(parse_u64(key, v));
  } else if (key == "ssd.page_size") {
    cfg.ssd.page_size = static_cast<std::uint32_t>(parse_u64(key, v));
  } else if (key == "ssd.pages_per_block") {
    cfg.ssd.pages_per_block = static_cast<std::uint32_t>(parse_u64(key, v));
  } else if (key == "ssd.physical_blocks") {
    cfg.ssd.physical_blocks = static_cast<std::uint32_t>(parse_u64(key, v));
  } else if (key == "ssd.over_provision") {
    cfg.ssd.over_provision = parse_double(key, v);
  } else if (key == "ssd.read_service_us") {
    cfg.ssd.read_service_us = parse_u64(key, v);
  } else if (key == "ssd.write_service_us") {
    cfg.ssd.write_service_us = parse_u64(key, v);
  } else if (key == "ssd.erase_us") {
    cfg.ssd.erase_us = parse_u64(key, v);
  } else if (key == "ssd.copy_page_us") {
    cfg.ssd.copy_page_us = parse_u64(key, v);
  } else if (key == "ssd.max_outstanding") {
    cfg.ssd.max_outstanding = static_cast<std::uint32_t>(parse_u64(key, v));
  } else if (key == "ssd.gc_low_watermark") {
    cfg.ssd.gc_low_watermark = parse_double(key, v);
  } else if (key == "ssd.gc_high_watermark") {
    cfg.ssd.gc_high_watermark = parse_double(key, v);
  } else if (key == "ssd.service_jitter") {
    cfg.ssd.service_jitter = parse_double(key, v);
  } else if (key == "ssd.gc_enabled") {
    cfg.ssd.gc_enabled = parse_bool(key, v);
  } else if (key == "cache.pages") {
    cfg.cache.cache_pages = parse_u64(key, v);
  } else if (key == "cache.set_size") {
    cfg.cache.set_size = static_cast<std::uint32_t>(parse_u64(key, v));
  } else if (key == "cache.gclock_cap") {
    cfg.cache.gclock_cap = static_cast<int>(parse_u64(key, v));
  } else if (key == "cache.insert_hits") {
    cfg.cache.insert_hits = static_cast<int>(parse_u64(key, v));
  } else if (key == "cache.debug_checks") {
    cfg.cache.debug_checks = parse_bool(key, v);
  } else if (key == "cache.bypass") {
    cfg.cache_bypass = parse_bool(key, v);
  } else if (key == "queue.high_capacity") {
    cfg.queue.high_capacity = parse_u64(key, v);
  } else if (key == "queue.low_capacity") {
    cfg.queue.low_capacity = parse_u64(key, v);
  } else if (key == "queue.reserved_high_slots") {
    cfg.queue.reserved_high_slots = static_cast<std::uint32_t>(parse_u64(key, v));
  } else if (key == "queue.discard_threshold") {
    cfg.queue.discard_threshold = static_cast<int>(parse_u64(key, v));
  } else if (key == "flusher.enabled") {
    cfg.flusher.enabled = parse_bool(key, v);
  } else if (key == "flusher.dirty_threshold") {
    cfg.flusher.dirty_threshold = static_cast<int>(parse_u64(key, v));
  } else if (key == "flusher.min_score") {
    cfg.flusher.min_score = static_cast<int>(parse_u64(key, v));
  } else if (key == "flusher.batch") {
    cfg.flusher.batch = static_cast<int>(parse_u64(key, v));
  } else if (key == "flusher.cap_per_ssd") {
    cfg.flusher.cap_per_ssd = static_cast<std::uint32_t>(parse_u64(key, v));
  } else if (key == "workload.pattern") {
    if (v == "uniform") cfg.workload.pattern = Pattern::Uniform;
    else if (v == "zipfian") cfg.workload.pattern = Pattern::Zipfian;
    else bad(key, "expected uniform|zipfian, got '" + v + "'");
  } else if (key == "workload.zipf_theta") {
    cfg.workload.zipf_theta = parse_double(key, v);
  } else if (key == "workload.read_fraction") {
    cfg.workload.read_fraction = parse_double(key, v);
  } else if (key == "workload.op_size") {
    cfg.workload.op_size = static_cast<std::uint32_t>(parse_u64(key, v));
  } else if (key == "workload.unaligned") {
    cfg.workload.unaligned = parse_bool(key, v);
  } else if (key == "workload.issue") {
    if (v == "sync") cfg.workload.issue = IssueModel::Sync;
    else if (v == "async") cfg.workload.issue = IssueModel::Async;
    else bad(key, "expected sync|async, got '" + v + "'");
  } else if (key == "workload.sync_threads") {
    cfg.workload.sync_threads = static_cast<std::uint32_t>(parse_u64(key, v));
  } else if (key == "workload.depth_per_ssd") {
    cfg.workload.depth_per_ssd = static_cast<std::uint32_t>(parse_u64(key, v));
  } else if (key == "workload.footprint_pages") {
    cfg.workload.footprint_pages = parse_u64(key, v);
  } else if (key == "workload.total_ops") {
    cfg.workload.total_ops = parse_u64(key, v);
  } else if (key == "metrics.warmup_fraction") {
    cfg.warmup_fraction = parse_double(key, v);
  } else if (key == "metrics.tail_fraction") {
    cfg.tail_fraction = parse_double(key, v);
  } else if (key == "precondition_overwrites") {
    cfg.precondition_overwrites = parse_double(key, v);
  } else if (key == "experiment") {
    if (v == "single") cfg.experiment = ExperimentKind::Single;
    else if (v == "flusher_ab") cfg.experiment = ExperimentKind::FlusherAb;
    else if (v == "occupancy_sweep") cfg.experiment = ExperimentKind::OccupancySweep;
    else if (v == "array_scale") cfg.experiment = ExperimentKind::ArrayScale;
    else if (v == "parallel_sweep") cfg.experiment = ExperimentKind::ParallelSweep;
    else if (v == "mixed_sweep") cfg.experiment = ExperimentKind::MixedSweep;
    else if (v == "writeback_table") cfg.experiment = ExperimentKind::WritebackTable;
    else bad(key, "unknown experiment '" + v + "'");
  } else if (key == "sweep.occupancies") {
    cfg.sweep_occupancies = parse_list<double>(key, v, parse_double);
  } else if (key == "sweep.ssds") {
    cfg.sweep_ssds = parse_list<std::uint32_t>(
        key, v, [](const std::string& k, const std::string& s) {
          return static_cast<std::uint32_t>(parse_u64(k, s));
        });
  } else if (key == "sweep.parallelism") {
    cfg.sweep_parallelism = parse_list<std::uint64_t>(key, v, parse_u64);
  } else if (key == "sweep.read_fractions") {
    cfg.sweep_read_fractions = parse_list<double>(key, v, parse_double);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void apply_config_text(RunConfig& cfg, const std::string& text,
                       const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    try {
      apply_key(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " +
                        e.what());
    }
  }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  apply_config_text(cfg, buf.str(), path);
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "' is not key=value");
  apply_key(cfg, trim(assignment.substr(0, eq)),
            trim(assignment.substr(eq + 1)));
}

void RunConfig::validate() const {
  if (num_ssds == 0) throw ConfigError("num_ssds must be > 0");
  if (occupancy <= 0.0 || occupancy >= 1.0)
    throw ConfigError("occupancy must be in (0,1)");
  if (warmup_fraction < 0.0 || warmup_fraction >= 1.0)
    throw ConfigError("metrics.warmup_fraction must be in [0,1)");
  if (tail_fraction < 0.0 || warmup_fraction + tail_fraction >= 1.0)
    throw ConfigError("metrics.tail_fraction too large");
  if (precondition_overwrites < 0.0)
    throw ConfigError("precondition_overwrites must be >= 0");
  ssd.validate();
  if (stripe_unit == 0 || stripe_unit % ssd.page_size != 0)
    throw ConfigError("layout.stripe_unit must be a multiple of ssd.page_size");
  queue.validate(ssd.max_outstanding);
  flusher.validate();
  if (!cache_bypass) {
    CacheConfig c = cache;  // cache.pages = 0 means auto-size
    c.cache_pages = effective_cache_pages();
    c.validate();
    // A flush below the discard bar would be dropped at the queue head and
    // immediately re-selected, looping forever at one virtual time.
    if (flusher.enabled && flusher.min_score < queue.discard_threshold)
      throw ConfigError(
          "flusher.min_score must be >= queue.discard_threshold");
  }
  WorkloadSpec w = workload;
  w.footprint_pages = effective_footprint();
  w.validate();
  if (w.footprint_pages > capacity_pages())
    throw ConfigError("workload footprint exceeds array capacity");
}

std::uint64_t RunConfig::capacity_pages() const {
  return ssd.logical_pages() * num_ssds;
}

std::uint64_t RunConfig::effective_footprint() const {
  if (workload.footprint_pages != 0) return workload.footprint_pages;
  return static_cast<std::uint64_t>(occupancy *
                                    static_cast<double>(capacity_pages()));
}

std::uint64_t RunConfig::effective_cache_pages() const {
  if (cache.cache_pages != 0) return cache.cache_pages;
  const std::uint64_t auto_pages = effective_footprint() / 8;
  return auto_pages < cache.set_size ? cache.set_size : auto_pages;
}

std::string RunConfig::workload_fingerprint() const {
  std::ostringstream os;
  os << (workload.pattern == Pattern::Zipfian ? "zipf:" : "uni:")
     << workload.zipf_theta << ':' << workload.read_fraction << ':'
     << workload.op_size << ':' << (workload.unaligned ? 'u' : 'a') << ':'
     << (workload.issue == IssueModel::Sync ? 's' : 'y') << ':'
     << workload.sync_threads << ':' << workload.depth_per_ssd << ':'
     << effective_footprint() << ':' << workload.total_ops << ':' << seed;
  return os.str();
}

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Single: return "single";
    case ExperimentKind::FlusherAb: return "flusher_ab";
    case ExperimentKind::OccupancySweep: return "occupancy_sweep";
    case ExperimentKind::ArrayScale: return "array_scale";
    case ExperimentKind::ParallelSweep: return "parallel_sweep";
    case ExperimentKind::MixedSweep: return "mixed_sweep";
    case ExperimentKind::WritebackTable: return "writeback_table";
  }
  return "?";
}

}  // namespace ssdsim
