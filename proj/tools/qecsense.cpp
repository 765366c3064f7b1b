// Copyright 2026 The qecsense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qecsense/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qecsense: simulate QEC-enhanced bosonic sensing experiments"};
  app.require_subcommand(1);

  qecsense::RunOptions options;
  std::string output_dir = ".";
  long shots = -1;
  std::uint64_t seed = 0;

  std::string manifest_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("manifest", manifest_path, "Path to the JSON run manifest")->required();
    sub->add_option("--output-dir", output_dir, "Directory for results and summary files");
    sub->add_option("--threads", options.threads, "Worker threads for grid points")->check(CLI::PositiveNumber);
    sub->add_option("--sampled", shots, "Monte Carlo shots per grid point (0 = exact)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "Seed for sampled mode");
  };
  CLI::App* run = app.add_subcommand("run", "Execute a manifest and write its artifacts");
  add_common(run);
  CLI::App* validate = app.add_subcommand("validate", "Check a manifest without running it");
  add_common(validate);

  CLI11_PARSE(app, argc, argv);

  options.output_dir = output_dir;
  if (shots >= 0) options.sampled_shots = shots;
  if (run->count("--seed") + validate->count("--seed") > 0) options.seed = seed;

  try {
    const qecsense::RunManifest manifest = qecsense::load_manifest(manifest_path, options.sampled_shots);
    if (validate->parsed()) {
      std::cout << qecsense::validate_report(manifest, options);
      return 0;
    }
    const auto artifacts = qecsense::run_manifest(manifest, options);
    std::cout << "results = " << artifacts.results.string() << "\n"
              << "summary = " << artifacts.summary.string() << "\n";
    return 0;
  } catch (const qecsense::ManifestError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const qecsense::BranchLimitError& e) {
    std::cerr << "error: " << manifest_path << ": " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << manifest_path << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
