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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "qecsense/manifest.hpp"

namespace qecsense {

struct RunOptions {
  std::filesystem::path output_dir = ".";
  int threads = 1;
  /// Override the manifest's sampled_shots / seed.
  std::optional<long> sampled_shots;
  std::optional<std::uint64_t> seed;
};

struct RunArtifacts {
  std::filesystem::path results;
  std::filesystem::path summary;
};

/// Executes the manifest and writes the results table and the key = value
/// summary. Simulation failures are rethrown naming the grid point.
RunArtifacts run_manifest(const RunManifest& manifest, const RunOptions& options = {});

/// Full check without running: "ok" followed by resolved values, t_tot and
/// the number of outcome strings 2^M.
std::string validate_report(const RunManifest& manifest, const RunOptions& options = {});

/// %.17g.
std::string format_number(double x);

}  // namespace qecsense
