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

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "ssdsim/common.hpp"
#include "ssdsim/engine.hpp"

namespace ssdsim {

enum class Pattern : std::uint8_t { Uniform, Zipfian };
enum class IssueModel : std::uint8_t { Sync, Async };

struct WorkloadSpec {
  Pattern pattern = Pattern::Uniform;
  double zipf_theta = 0.99;
  double read_fraction = 0.0;
  std::uint32_t op_size = 4096;
  bool unaligned = false;           // place the op at a random in-page offset
  IssueModel issue = IssueModel::Async;
  std::uint32_t sync_threads = 32;  // logical issuers, one op in flight each
  std::uint32_t depth_per_ssd = 32;
  std::uint64_t footprint_pages = 0;
  std::uint64_t total_ops = 0;
  std::uint64_t seed = 1;
  void validate() const;
};

struct AppOp {
  std::uint64_t offset = 0;
  std::uint32_t size = 0;
  bool is_read = false;
};

/// Zipfian rank sampler over [0, n) backed by a precomputed CDF; rank 0 is
/// the hottest item. Exact for any theta, including 1.0.
class ZipfianGenerator {
 public:
  ZipfianGenerator(std::uint64_t n, double theta);
  std::uint64_t next(std::mt19937_64& rng);

 private:
  std::uint64_t n_;
  std::vector<double> cdf_;
};

/// Deterministic stream of application requests for one run.
class OpGenerator {
 public:
  OpGenerator(const WorkloadSpec& spec, std::uint32_t page_size);
  AppOp next_op();

 private:
  std::uint64_t sample_page();

  WorkloadSpec spec_;
  std::uint32_t page_size_;
  std::mt19937_64 rng_;
  std::optional<ZipfianGenerator> zipf_;
};

/// Issues ops in order against a submit function, keeping up to `depth` ops in
/// flight. Sync mode is the same machinery with depth = sync_threads. A submit
/// returning false means backpressure; issuing resumes on notify_space().
class Driver {
 public:
  using SubmitFn =
      std::function<bool(const AppOp&, std::function<void(SimTime)> done)>;

  Driver(const WorkloadSpec& spec, std::uint32_t page_size,
         std::uint32_t depth, SubmitFn submit);

  void start();
  void notify_space();

  std::uint64_t issued() const { return issued_; }
  std::uint64_t completed() const { return completed_; }
  std::uint64_t in_flight() const { return issued_ - completed_; }
  bool finished() const { return completed_ == spec_.total_ops; }

  std::function<void(SimTime)> on_all_complete;
  std::function<void(SimTime)> on_op_complete;
  std::uint32_t max_observed_in_flight = 0;

 private:
  void try_issue();

  WorkloadSpec spec_;
  OpGenerator gen_;
  std::uint32_t depth_;
  SubmitFn submit_;
  std::uint64_t issued_ = 0;
  std::uint64_t completed_ = 0;
  std::optional<AppOp> head_;  // op blocked on backpressure
  bool issuing_ = false;
};

}  // namespace ssdsim
