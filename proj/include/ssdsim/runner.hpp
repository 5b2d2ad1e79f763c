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

#include <map>
#include <string>
#include <vector>

#include "ssdsim/config.hpp"
#include "ssdsim/metrics.hpp"

namespace ssdsim {

/// Output of one experiment: a CSV table, a human-readable summary, named
/// scalar results for programmatic checks, and the raw per-run metrics.
struct ExperimentResult {
  std::string csv;
  std::string summary;
  std::map<std::string, double> values;
  std::vector<RunMetrics> runs;
};

/// Executes the experiment selected by cfg.experiment. Paired experiments run
/// both arms with the same seed and request stream.
ExperimentResult run_experiment(const RunConfig& cfg);

/// Array throughput if every SSD sustained its single-device steady-state
/// write rate at the configured occupancy.
double independent_ssd_ceiling(const RunConfig& cfg);

}  // namespace ssdsim
