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

// Maximization of the normalized Fisher rate Q over code amplitude and QEC
// schedule.

#pragma once

#include <span>
#include <vector>

#include "qecsense/analysis.hpp"

namespace qecsense {

struct OptimizationProblem {
  /// Code levels, T1, overheads, imperfections, phase grid and truncation.
  /// The code amplitude, tau_int and M are overridden by the search.
  ExperimentConfig base;
  Strategy strategy = Strategy::QEC_QJT;
  /// Interval bounds (s); for TLS and NoQEC tau is the whole t_int.
  double tau_min = 1.43e-6;
  double tau_max = 143e-6;
  int M_max = 10;
  int alpha_points = 17;
  int tau_points = 16;
  int max_iterations = 300;
  /// Relative spread of the simplex objective at convergence.
  double tolerance = 1e-10;
  int threads = 1;

  void validate() const;
  /// Rounds searched: 1..M_max for QEC strategies, {1} otherwise.
  int rounds() const;
};

struct OptimizationPoint {
  double alpha = 0;
  double tau_int = 0;
  int M = 1;
  double Q = 0;
  /// "grid" or "simplex".
  const char* phase = "grid";
};

struct OptimizationResult {
  OptimizationPoint best;
  double best_grid_Q = 0;
  std::vector<OptimizationPoint> trace;
  bool converged = false;
  int iterations = 0;
};

/// Q = F / t_tot of one full simulated run.
double evaluate_q(const OptimizationProblem& problem, double alpha, double tau_int, int M);

/// Q for every M in 1..problem.rounds() at fixed (alpha, tau_int), index M-1.
std::vector<double> evaluate_q_rounds(const OptimizationProblem& problem, double alpha, double tau_int);

/// Coarse grid over alpha = i/(alpha_points+1), geometric tau and all M, then
/// a Nelder-Mead simplex on (alpha, ln tau) at the best M. Deterministic.
OptimizationResult optimize_q(const OptimizationProblem& problem);

struct SweepTable {
  std::vector<double> t_int;
  std::vector<Strategy> strategies;
  /// Q[strategy index][t_int index]
  std::vector<std::vector<double>> Q;
  std::vector<std::vector<double>> F;
  std::vector<std::vector<double>> t_tot;
  /// Rounds used at each t_int by the QEC strategies.
  std::vector<int> M;
};

/// Q(t_int) per strategy. QEC strategies use M = clamp(round(t_int / tau), 1,
/// M_max) rounds of tau_eff = t_int / M with tau = config.tau_int.
SweepTable sweep_q(const ExperimentConfig& config, std::span<const double> t_int,
                   std::span<const Strategy> strategies, int M_max = 10, int threads = 1);

/// n points from lo to hi, equally spaced in log.
std::vector<double> geometric_grid(double lo, double hi, int n);

}  // namespace qecsense
