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
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssdsim/config.hpp"
#include "ssdsim/runner.hpp"

namespace fs = std::filesystem;

#ifndef SSDSIM_PRESET_DIR
#define SSDSIM_PRESET_DIR "presets"
#endif

namespace {

std::vector<std::string> list_presets(const std::string& dir) {
  std::vector<std::string> names;
  if (!fs::exists(dir)) return names;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".cfg") names.push_back(e.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SSD array simulator"};
  std::string config_path, preset, out_dir = ".";
  std::string preset_dir = SSDSIM_PRESET_DIR;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_set = false, do_list = false;

  app.add_option("--config", config_path, "Config file (flat key = value)");
  app.add_option("--preset", preset, "Named preset scenario");
  app.add_option("--preset-dir", preset_dir, "Directory holding preset .cfg files");
  app.add_option("--seed", seed, "Override the run seed")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--out", out_dir, "Output directory for CSV and summary");
  app.add_option("--override", overrides, "key=value override, repeatable");
  app.add_flag("--list-presets", do_list, "List available presets and exit");

  CLI11_PARSE(app, argc, argv);

  if (do_list) {
    for (const auto& n : list_presets(preset_dir)) std::cout << n << "\n";
    return 0;
  }

  try {
    ssdsim::RunConfig cfg;
    std::string name = "run";
    if (!preset.empty()) {
      const std::string path = preset_dir + "/" + preset + ".cfg";
      ssdsim::apply_config_file(cfg, path);
      name = preset;
    }
    if (!config_path.empty()) {
      ssdsim::apply_config_file(cfg, config_path);
      name = fs::path(config_path).stem().string();
    }
    if (preset.empty() && config_path.empty())
      throw ssdsim::ConfigError("need --preset or --config (see --list-presets)");
    for (const auto& o : overrides) ssdsim::apply_override(cfg, o);
    if (seed_set) cfg.seed = seed;
    cfg.validate();

    ssdsim::ExperimentResult res = ssdsim::run_experiment(cfg);

    fs::create_directories(out_dir);
    const fs::path csv_path = fs::path(out_dir) / (name + ".csv");
    std::ofstream(csv_path) << res.csv;
    std::ofstream(fs::path(out_dir) / (name + "_summary.txt")) << res.summary;
    std::cout << res.summary;
    std::cout << "wrote " << csv_path.string() << "\n";
    return 0;
  } catch (const ssdsim::InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const ssdsim::SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
