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
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "ssdsim/workload.hpp"

using namespace ssdsim;

namespace {
WorkloadSpec base_spec() {
  WorkloadSpec w;
  w.footprint_pages = 64;
  w.total_ops = 1000;
  w.op_size = 4096;
  w.seed = 42;
  return w;
}
}  // namespace

TEST_CASE("uniform page draws pass a chi-square test") {
  WorkloadSpec w = base_spec();
  const std::uint64_t samples = 64000;
  w.total_ops = samples;
  OpGenerator gen(w, 4096);
  std::vector<std::uint64_t> counts(w.footprint_pages, 0);
  for (std::uint64_t i = 0; i < samples; ++i) {
    const AppOp op = gen.next_op();
    ++counts[op.offset / 4096];
  }
  const double expect =
      static_cast<double>(samples) / static_cast<double>(w.footprint_pages);
  double chi2 = 0.0;
  for (const std::uint64_t c : counts) {
    const double d = static_cast<double>(c) - expect;
    chi2 += d * d / expect;
  }
  // 63 degrees of freedom: the 99.9th percentile is about 104.
  CHECK(chi2 < 104.0);
}

TEST_CASE("zipfian rank frequencies follow a theta=1 power law") {
  const std::uint64_t n = 100;
  ZipfianGenerator zipf(n, 1.0);
  std::mt19937_64 rng(7);
  const std::uint64_t samples = 400000;
  std::vector<std::uint64_t> counts(n, 0);
  for (std::uint64_t i = 0; i < samples; ++i) ++counts[zipf.next(rng)];
  double hn = 0.0;
  for (std::uint64_t r = 1; r <= n; ++r) hn += 1.0 / static_cast<double>(r);
  double chi2 = 0.0;
  for (std::uint64_t r = 0; r < n; ++r) {
    const double expect =
        static_cast<double>(samples) / (static_cast<double>(r + 1) * hn);
    const double d = static_cast<double>(counts[r]) - expect;
    chi2 += d * d / expect;
  }
  // 99 degrees of freedom: the 99.9th percentile is about 149.
  CHECK(chi2 < 149.0);
  // Spot-check the defining ratio: rank 0 is twice as likely as rank 1.
  const double ratio =
      static_cast<double>(counts[0]) / static_cast<double>(counts[1]);
  CHECK(ratio > 1.8);
  CHECK(ratio < 2.2);
}

TEST_CASE("zipfian op streams concentrate on few pages") {
  WorkloadSpec w = base_spec();
  w.pattern = Pattern::Zipfian;
  w.zipf_theta = 0.99;
  w.footprint_pages = 1000;
  OpGenerator gen(w, 4096);
  std::map<std::uint64_t, std::uint64_t> counts;
  const std::uint64_t samples = 50000;
  for (std::uint64_t i = 0; i < samples; ++i)
    ++counts[gen.next_op().offset / 4096];
  std::uint64_t hottest = 0;
  for (const auto& [page, c] : counts) hottest = std::max(hottest, c);
  // The hottest page draws about 1/H_n of the traffic (~13% for n=1000),
  // far above the uniform 0.1%.
  CHECK(static_cast<double>(hottest) > 0.08 * static_cast<double>(samples));
}

TEST_CASE("op streams are deterministic in the seed") {
  WorkloadSpec w = base_spec();
  w.pattern = Pattern::Zipfian;
  w.read_fraction = 0.3;
  OpGenerator a(w, 4096), b(w, 4096);
  for (int i = 0; i < 500; ++i) {
    const AppOp x = a.next_op();
    const AppOp y = b.next_op();
    CHECK(x.offset == y.offset);
    CHECK(x.size == y.size);
    CHECK(x.is_read == y.is_read);
  }
  w.seed = 43;
  OpGenerator c(w, 4096);
  bool all_same = true;
  OpGenerator a2(base_spec(), 4096);
  for (int i = 0; i < 100; ++i)
    all_same = all_same && c.next_op().offset == a2.next_op().offset;
  CHECK_FALSE(all_same);
}

TEST_CASE("aligned ops sit on page boundaries, unaligned ones jitter") {
  WorkloadSpec w = base_spec();
  OpGenerator aligned(w, 4096);
  for (int i = 0; i < 200; ++i) CHECK(aligned.next_op().offset % 4096 == 0);

  w.unaligned = true;
  w.op_size = 128;
  OpGenerator jittered(w, 4096);
  const std::uint64_t cap = w.footprint_pages * 4096ull;
  bool saw_offset = false;
  for (int i = 0; i < 200; ++i) {
    const AppOp op = jittered.next_op();
    CHECK(op.offset + op.size <= cap);
    if (op.offset % 4096 != 0) saw_offset = true;
  }
  CHECK(saw_offset);
}

TEST_CASE("read fraction controls the op mix") {
  WorkloadSpec w = base_spec();
  w.read_fraction = 0.25;
  w.total_ops = 20000;
  OpGenerator gen(w, 4096);
  std::uint64_t reads = 0;
  for (std::uint64_t i = 0; i < w.total_ops; ++i)
    if (gen.next_op().is_read) ++reads;
  const double frac = static_cast<double>(reads) / w.total_ops;
  CHECK(frac > 0.22);
  CHECK(frac < 0.28);
}

TEST_CASE("the driver keeps at most depth ops in flight") {
  WorkloadSpec w = base_spec();
  w.total_ops = 300;
  std::vector<std::function<void(SimTime)>> pending;
  Driver drv(w, 4096, 8, [&](const AppOp&, std::function<void(SimTime)> done) {
    pending.push_back(std::move(done));
    return true;
  });
  std::uint64_t completions = 0;
  drv.on_op_complete = [&](SimTime) { ++completions; };
  bool all_done = false;
  drv.on_all_complete = [&](SimTime) { all_done = true; };
  drv.start();
  CHECK(drv.in_flight() == 8);
  while (!pending.empty()) {
    CHECK(drv.in_flight() <= 8);
    auto done = std::move(pending.front());
    pending.erase(pending.begin());
    done(0);
  }
  CHECK(all_done);
  CHECK(completions == 300);
  CHECK(drv.issued() == 300);
  CHECK(drv.max_observed_in_flight == 8);
}

TEST_CASE("the driver pauses on backpressure and resumes on notify") {
  WorkloadSpec w = base_spec();
  w.total_ops = 10;
  bool accept = false;
  std::vector<std::function<void(SimTime)>> pending;
  Driver drv(w, 4096, 4, [&](const AppOp&, std::function<void(SimTime)> done) {
    if (!accept) return false;
    pending.push_back(std::move(done));
    return true;
  });
  drv.start();
  CHECK(drv.issued() == 0);
  accept = true;
  drv.notify_space();
  CHECK(drv.issued() == 4);
  while (!pending.empty()) {
    auto done = std::move(pending.front());
    pending.erase(pending.begin());
    done(0);
  }
  CHECK(drv.completed() == 10);
}

TEST_CASE("spec validation") {
  WorkloadSpec w = base_spec();
  w.total_ops = 0;
  CHECK_THROWS_AS(w.validate(), ConfigError);
  w = base_spec();
  w.read_fraction = 1.5;
  CHECK_THROWS_AS(w.validate(), ConfigError);
  w = base_spec();
  w.op_size = 0;
  CHECK_THROWS_AS(w.validate(), ConfigError);
}
