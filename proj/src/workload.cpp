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
#include "ssdsim/workload.hpp"

#include <algorithm>
#include <cmath>

namespace ssdsim {

void WorkloadSpec::validate() const {
  if (read_fraction < 0.0 || read_fraction > 1.0)
    throw ConfigError("workload: read_fraction must be in [0,1]");
  if (op_size == 0) throw ConfigError("workload: op_size must be > 0");
  if (footprint_pages == 0)
    throw ConfigError("workload: footprint_pages must be > 0");
  if (total_ops == 0) throw ConfigError("workload: total_ops must be > 0");
  if (zipf_theta <= 0.0 || zipf_theta >= 2.0)
    throw ConfigError("workload: zipf_theta must be in (0,2)");
  if (issue == IssueModel::Sync && sync_threads == 0)
    throw ConfigError("workload: sync_threads must be > 0");
  if (issue == IssueModel::Async && depth_per_ssd == 0)
    throw ConfigError("workload: depth_per_ssd must be > 0");
}

ZipfianGenerator::ZipfianGenerator(std::uint64_t n, double theta) : n_(n) {
  if (n == 0) throw ConfigError("zipfian: n must be > 0");
  cdf_.resize(n_);
  double sum = 0.0;
  for (std::uint64_t i = 0; i < n_; ++i) {
    sum += 1.0 / std::pow(double(i + 1), theta);
    cdf_[i] = sum;
  }
  for (auto& v : cdf_) v /= sum;
}

std::uint64_t ZipfianGenerator::next(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  const double u = dist(rng);
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  return it == cdf_.end() ? n_ - 1
                          : static_cast<std::uint64_t>(it - cdf_.begin());
}

OpGenerator::OpGenerator(const WorkloadSpec& spec, std::uint32_t page_size)
    : spec_(spec), page_size_(page_size), rng_(spec.seed) {
  spec_.validate();
  if (spec_.pattern == Pattern::Zipfian)
    zipf_.emplace(spec_.footprint_pages, spec_.zipf_theta);
  if (spec_.op_size > page_size_ && spec_.unaligned)
    throw ConfigError("workload: unaligned ops must fit in one page");
}

std::uint64_t OpGenerator::sample_page() {
  if (spec_.pattern == Pattern::Uniform) {
    std::uniform_int_distribution<std::uint64_t> d(0, spec_.footprint_pages - 1);
    return d(rng_);
  }
  // Scramble the rank so hot pages spread over the address space (and thus
  // over all SSDs) instead of clustering in one stripe.
  const std::uint64_t rank = zipf_->next(rng_);
  std::uint64_t h = (rank + 1) * 0xc6a4a7935bd1e995ull;
  h ^= h >> 47;
  h *= 0xff51afd7ed558ccdull;
  return h % spec_.footprint_pages;
}

AppOp OpGenerator::next_op() {
  AppOp op;
  const std::uint64_t page = sample_page();
  op.size = spec_.op_size;
  if (spec_.unaligned) {
    std::uniform_int_distribution<std::uint32_t> d(1, page_size_ - spec_.op_size);
    op.offset = page * page_size_ + d(rng_);
  } else {
    op.offset = page * page_size_;
  }
  if (spec_.read_fraction <= 0.0) {
    op.is_read = false;
  } else if (spec_.read_fraction >= 1.0) {
    op.is_read = true;
  } else {
    std::bernoulli_distribution d(spec_.read_fraction);
    op.is_read = d(rng_);
  }
  return op;
}

Driver::Driver(const WorkloadSpec& spec, std::uint32_t page_size,
               std::uint32_t depth, SubmitFn submit)
    : spec_(spec), gen_(spec, page_size), depth_(depth),
      submit_(std::move(submit)) {
  if (depth_ == 0) throw ConfigError("driver: depth must be > 0");
}

void Driver::start() { try_issue(); }

void Driver::notify_space() { try_issue(); }

void Driver::try_issue() {
  if (issuing_) return;  // flatten re-entry from synchronous completions
  issuing_ = true;
  while (issued_ < spec_.total_ops && in_flight() < depth_) {
    if (!head_) head_ = gen_.next_op();
    const bool ok = submit_(*head_, [this](SimTime t) {
      ++completed_;
      if (on_op_complete) on_op_complete(t);
      if (completed_ == spec_.total_ops && on_all_complete) on_all_complete(t);
      try_issue();
    });
    if (!ok) break;  // backpressure; resumes via notify_space()
    head_.reset();
    ++issued_;
    max_observed_in_flight =
        std::max<std::uint32_t>(max_observed_in_flight,
                                static_cast<std::uint32_t>(in_flight()));
  }
  issuing_ = false;
}

}  // namespace ssdsim
