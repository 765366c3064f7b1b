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

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qecsense/protocol.hpp"

namespace qecsense {

/// P(phi0) ~ A + B cos(phi0 + phi), B >= 0, with first-order uncertainties.
struct FringeFit {
  double A = 0;
  double B = 0;
  double phi = 0;
  double residual_rms = 0;
  double sigma_A = 0;
  double sigma_B = 0;
  double sigma_phi = 0;
};

/// Linear least squares on {1, cos phi0, sin phi0}. Optional weights are
/// inverse variances; without them the covariance is scaled by the residual
/// variance. Needs >= 3 distinct phases spanning more than pi.
FringeFit fit_fringe(std::span<const double> phi0, std::span<const double> P,
                     std::span<const double> weights = {});

/// Unweighted fits of every (j, l) fringe, so that the offsets of a dataset
/// sum to exactly 1 on a shared phase grid.
std::vector<std::array<FringeFit, 2>> fit_classes(const FringeDataset& data);
/// Fit of the merged g fringe; sampled datasets are weighted by binomial shot
/// noise.
FringeFit fit_merged(const FringeDataset& data);

/// (n-m)^2 t^2 B^2 / (A (1 - A)): binary-outcome Fisher information of the
/// fringe at its steepest point.
double classical_fi(const FringeFit& fit, int n_minus_m, double t_int);

/// sum_{j,l} B_{l,j}^2 (n-m)^2 t^2 / A_{l,j} over jump-resolved fringes.
double qjt_fi(std::span<const std::array<FringeFit, 2>> fits, int n_minus_m, double t_int);

/// Fisher information of a strategy's dataset: classical_fi of the merged
/// fringe, or qjt_fi for QEC_QJT.
double strategy_fi(const FringeDataset& data, Strategy strategy, int n_minus_m, double t_int);

/// 2 sum_{l_i + l_j > eps} |<i|drho|j>|^2 / (l_i + l_j).
double qfi_from_derivative(const CMatrix<double>& rho, const CMatrix<double>& drho,
                           double eps = 1e-12);

struct QfiEstimate {
  double value = 0;
  double value_half_step = 0;
  /// The two step sizes agree within 1e-4 relative.
  bool stable = true;
};

/// Quantum Fisher information of omega -> rho(omega) by central differences
/// with steps delta and delta/2.
QfiEstimate true_qfi(const std::function<DensityMatrix<>(double)>& family, double omega,
                     double delta);

/// Block-diagonal direct sum (classical record x probe state).
DensityMatrix<> direct_sum(std::span<const DensityMatrix<>> blocks);

struct SensitivityReport {
  double F = 0;
  double Q = 0;
  double sigma_omega = 0;
  std::optional<double> sigma_p;
  double t_tot = 0;
  Strategy strategy = Strategy::QEC_QJT;
};

/// Q = F / t_tot, sigma_omega = 1/sqrt(Q), sigma_p = sigma_omega / chi.
SensitivityReport sensitivity_report(double F, double t_tot, std::optional<double> chi,
                                     Strategy strategy);

/// 20 log10(sigma_ref / sigma).
double enhancement_db(double sigma_ref, double sigma);

enum class RadiometryMode { Merged, QJT };

struct RadiometrySensitivity {
  double sigma_p = 0;
  /// dP_g/dp of the merged curve at the stencil center.
  double slope = 0;
  double P_g = 0;
  double p_center = 0;
};

/// Slopes by central differences at the third grid point of a uniform p grid
/// (steps h and 2h, Richardson-combined; they must agree within 1e-3).
///   Merged: sigma_p = sqrt(P_g (1 - P_g)) sqrt(t_tot) / |dP_g/dp|
///   QJT:    sigma_p = 1/sqrt(Q_p), Q_p = sum_{j,l} (dP_{l,j}/dp)^2 / (P_{l,j} t_tot)
/// A vanishing slope gives sigma_p = +inf.
RadiometrySensitivity radiometry_sensitivity(const RadiometryCurves& curves, double t_tot,
                                             RadiometryMode mode);

/// Uniform stencil {0, h, 2h, 3h, 4h} centered at 2h.
std::vector<double> radiometry_stencil(double h);

}  // namespace qecsense
