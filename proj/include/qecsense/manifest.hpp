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

// Run manifests: strict JSON experiment descriptions.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qecsense/optimize.hpp"

namespace qecsense {

inline constexpr int kSchemaVersion = 1;

/// Malformed manifest: syntax error (with line and column), unknown key,
/// wrong type or out-of-range value (with the field path).
class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { VirtualPhase, QecSweep, Radiometry, Optimize, Wigner };

std::string_view to_string(ExperimentKind kind);

struct VirtualPhaseSpec {
  std::vector<Strategy> strategies{Strategy::NoQEC, Strategy::QEC, Strategy::QEC_QJT};
  /// Round counts; t_int = M tau_int for every strategy.
  std::vector<int> M_values;
  std::optional<double> chi;
};

struct QecSweepSpec {
  std::vector<Strategy> strategies{Strategy::TLS, Strategy::NoQEC, Strategy::QEC, Strategy::QEC_QJT};
  std::vector<double> t_int;
  int M_max = 10;
};

struct RadiometryRun {
  int m = 0;
  int n = 1;
  std::optional<double> alpha;
  Strategy strategy = Strategy::TLS;
  /// Per-run overrides of the shared config.
  std::optional<double> tau_int;
  std::optional<int> M;
  std::optional<ImperfectionModel> imperfections;
};

struct RadiometrySpec {
  std::vector<RadiometryRun> runs;
  double chi = 2.0 * 3.14159265358979323846 * 15300.0;
  /// Stencil step in receiver population.
  double p_step = 1e-3;
};

struct OptimizeSpec {
  Strategy strategy = Strategy::QEC_QJT;
  double tau_min = 0;
  double tau_max = 0;
  int M_max = 10;
  int alpha_points = 17;
  int tau_points = 16;
  int max_iterations = 300;
  double tolerance = 1e-10;
};

enum class WignerStage { Encoded, Error, Recovered };

struct WignerSpec {
  WignerStage stage = WignerStage::Encoded;
  double re_min = -3, re_max = 3, im_min = -3, im_max = 3;
  int re_points = 61, im_points = 61;
  /// 0 selects the working dimension automatically.
  int working_dim = 0;
};

struct RunManifest {
  int schema_version = kSchemaVersion;
  ExperimentKind kind = ExperimentKind::VirtualPhase;
  std::string name;
  ExperimentConfig config;
  std::optional<std::uint64_t> seed;
  /// 0 runs the exact engine.
  long sampled_shots = 0;
  std::string results_file;
  std::string summary_file;
  std::variant<VirtualPhaseSpec, QecSweepSpec, RadiometrySpec, OptimizeSpec, WignerSpec> spec;
};

/// Parses and validates a manifest. `source` prefixes diagnostics and, when
/// the manifest has no "name", supplies the default output stem. A given
/// `sampled_shots` replaces the manifest's value before validation.
RunManifest parse_manifest(std::string_view text, std::string_view source = "manifest",
                           std::optional<long> sampled_shots = std::nullopt);

RunManifest load_manifest(const std::filesystem::path& path,
                          std::optional<long> sampled_shots = std::nullopt);

}  // namespace qecsense
