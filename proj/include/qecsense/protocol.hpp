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

// Sensing sequences: free Ramsey evolution, and M rounds of interrogation
// interleaved with autonomous QEC whose ancilla records are kept (jump
// tracking).

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qecsense/codes.hpp"

namespace qecsense {

enum class Strategy { TLS, NoQEC, QEC, QEC_QJT };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

/// Durations (s) of the non-interrogation steps of one shot.
struct Overheads {
  double t_init = 200e-6;
  double t_encode = 2e-6;
  double t_qec_pulse = 2e-6;
  double t_readout = 1e-6;
  double t_reset = 0.1e-6;
  double t_decode = 2e-6;
};

/// Classical operation errors, each a probability per use.
struct ImperfectionModel {
  /// A QEC round outputs the maximally mixed code-space state instead.
  double eps_qec = 0;
  /// An ancilla readout reports the wrong label.
  double eps_readout = 0;
  /// The conditional reset fails, inverting the next ancilla label.
  double eps_reset = 0;

  bool ideal() const { return eps_qec == 0 && eps_readout == 0 && eps_reset == 0; }
  void validate() const;
};

inline constexpr int kMaxExactRounds = 16;

/// n points uniformly covering [0, 2 pi).
std::vector<double> uniform_phase_grid(int points);

struct ExperimentConfig {
  CodeSpec<> code = CodeSpec<>::balanced(1, 3);
  double T1 = 143e-6;
  /// Quantity under estimation (rad/s).
  double omega = 0;
  double tau_int = 14.3e-6;
  int M = 1;
  Overheads overheads;
  ImperfectionModel imperfections;
  std::vector<double> phi0_grid = uniform_phase_grid(24);
  /// Highest loss order kept; negative means the full family (dim - 1).
  int k_max = -1;
  double dephasing_rate = 0;
  /// Readout phase of the decoding map.
  double phi1 = 0;

  Eigen::Index dim() const { return code.dim(); }
  int resolved_k_max() const { return k_max < 0 ? static_cast<int>(dim()) - 1 : k_max; }
  double t_int() const { return M * tau_int; }

  /// Throws std::invalid_argument, or BranchLimitError for M > kMaxExactRounds
  /// when `exact` is set.
  void validate(bool exact = true) const;
};

/// Wall-clock duration of a single shot.
///   QEC strategies: t_init + t_encode + M (tau + t_qec + t_readout + t_reset) + t_decode + t_readout
///   others:         t_init + t_encode + t_int + t_decode + t_readout
double total_time(const ExperimentConfig& config, Strategy strategy);

/// (n - m) omega t.
double acquired_phase(const CodeSpec<>& code, double omega, double t);

/// The configuration with the code replaced by the balanced (0, 1) encoding.
ExperimentConfig tls_config(const ExperimentConfig& config);

/// Outcome probabilities over the phi0 grid, per jump class j and final
/// ancilla label. P(j, g) + P(j, e) is the probability of class j.
struct FringeDataset {
  std::vector<double> phi0;
  std::vector<std::array<std::vector<double>, 2>> probability;
  std::optional<long> shots;

  int classes() const { return static_cast<int>(probability.size()); }
  const std::vector<double>& P(int j, Outcome l) const {
    return probability.at(static_cast<std::size_t>(j))[static_cast<std::size_t>(l)];
  }
  /// Sum over j.
  std::vector<double> merged(Outcome l) const;
};

struct SamplingOptions {
  long shots = 0;
  std::uint64_t seed = 0;
};

/// One autonomous QEC round: interrogation over tau (phase + loss), the
/// correcting pulse, and the ancilla readout.
///
/// The pulse maps the error levels {m-1, n-1} back with R_1 and flips the
/// ancilla; every other level is left alone with the ancilla in g. Higher-order
/// losses therefore land wherever E_k sends them and are labelled by that
/// level. eps_qec and eps_readout are folded into the outcome maps; the
/// reset error couples consecutive rounds and is handled by the sequence.
class QecInstrument {
 public:
  QecInstrument(const CodeSpec<>& code, double tau, double T1, const ImperfectionModel& imperfections,
                double omega = 0, int k_max = -1, double dephasing_rate = 0);

  Eigen::Index dim() const { return dim_; }
  const KrausChannel<>& channel() const { return channel_; }

  /// Maps for the true ancilla outcome (index by Outcome), including eps_qec.
  std::array<CMatrix<double>, 2> apply_true(const CMatrix<double>& x) const;
  /// Maps for the recorded label: apply_true mixed by the readout error.
  std::array<CMatrix<double>, 2> apply_recorded(const CMatrix<double>& x) const;

  /// Unnormalized conditional state for a recorded label.
  DensityMatrix<> apply(const DensityMatrix<>& rho, Outcome recorded) const;
  double probability(const DensityMatrix<>& rho, Outcome recorded) const;

  /// Completeness of the loss family on the code's levels 0..n.
  double completeness_defect() const { return channel_.completeness_defect(n_); }

 private:
  Eigen::Index dim_;
  int n_;
  KrausChannel<> channel_;
  CVector<double> phase_;
  std::vector<Eigen::Index> error_levels_;
  CMatrix<double> recovery_;
  CMatrix<double> code_mixed_;
  ImperfectionModel imp_;
};

/// Instrument at the code's truncation with the full loss family.
QecInstrument qec_instrument(const CodeSpec<>& code, double tau, double T1,
                             const ImperfectionModel& imperfections = {}, double omega = 0);

struct TrajectoryRecord {
  std::vector<Outcome> outcomes;
  int j = 0;
  double prob = 0;
  DensityMatrix<> rho_cond;
};

struct SequenceOptions {
  /// Enumerate all 2^M recorded outcome strings.
  bool records = false;
  std::optional<SamplingOptions> sampling;
};

struct SequenceResult {
  FringeDataset fringes;
  /// Per recorded jump count j: the unnormalized probe state after the last
  /// round, for the initial phase code.phi0().
  std::vector<DensityMatrix<>> class_states;
  std::vector<TrajectoryRecord> records;
};

/// Encode, evolve freely for config.t_int(), decode, read out.
FringeDataset run_no_qec(const ExperimentConfig& config,
                         const std::optional<SamplingOptions>& sampling = std::nullopt);

/// Probe state before decoding in the free-evolution sequence (phi0 = code.phi0()).
DensityMatrix<> no_qec_state(const ExperimentConfig& config);

SequenceResult run_qec_sequence(const ExperimentConfig& config, const SequenceOptions& options = {});

/// Exact fringes after each of the rounds 1..config.M; element r-1 equals
/// run_qec_sequence with M = r.
std::vector<FringeDataset> run_qec_rounds(const ExperimentConfig& config);

/// Dispatches to run_no_qec (TLS, NoQEC; TLS swaps in the (0, 1) code) or
/// run_qec_sequence (QEC, QEC_QJT).
FringeDataset run_strategy(const ExperimentConfig& config, Strategy strategy,
                           const std::optional<SamplingOptions>& sampling = std::nullopt);

/// P_{l,j}(p) for a receiver population grid; the probe frequency is chi p.
struct RadiometryCurves {
  std::vector<double> p;
  double chi = 0;
  double phi0 = 0;
  Strategy strategy = Strategy::QEC_QJT;
  /// probability[j][l][p index]
  std::vector<std::array<std::vector<double>, 2>> probability;

  std::vector<double> merged(Outcome l) const;
};

RadiometryCurves run_radiometry(const ExperimentConfig& config, std::span<const double> p_grid,
                                double chi, Strategy strategy,
                                const std::optional<SamplingOptions>& sampling = std::nullopt);

/// Initial phase maximizing dP_g/domega at omega = 0 for the merged fringe.
double max_slope_phi0(const ExperimentConfig& config, Strategy strategy);

}  // namespace qecsense
