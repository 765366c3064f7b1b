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

#include "qecsense/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qecsense {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Largest circular gap between sorted phases; the grid spans more than pi
/// when this is below pi.
double largest_gap(std::span<const double> phi0) {
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> w;
  w.reserve(phi0.size());
  for (double p : phi0) {
    double r = std::fmod(p, two_pi);
    if (r < 0) r += two_pi;
    w.push_back(r);
  }
  std::sort(w.begin(), w.end());
  double gap = w.front() + two_pi - w.back();
  for (std::size_t i = 1; i < w.size(); ++i) gap = std::max(gap, w[i] - w[i - 1]);
  return gap;
}

}  // namespace

FringeFit fit_fringe(std::span<const double> phi0, std::span<const double> P,
                     std::span<const double> weights) {
  detail::require(phi0.size() == P.size(), "fit_fringe: phase and probability lengths differ");
  detail::require(weights.empty() || weights.size() == P.size(), "fit_fringe: weight length mismatch");
  detail::require(phi0.size() >= 3, "fit_fringe: need at least 3 phases");
  detail::require(largest_gap(phi0) < std::numbers::pi,
                  "fit_fringe: phases must span more than pi (degenerate grid)");

  const auto N = static_cast<Eigen::Index>(phi0.size());
  Eigen::MatrixXd X(N, 3);
  Eigen::VectorXd y(N);
  Eigen::VectorXd w = Eigen::VectorXd::Ones(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto k = static_cast<std::size_t>(i);
    X(i, 0) = 1.0;
    X(i, 1) = std::cos(phi0[k]);
    X(i, 2) = std::sin(phi0[k]);
    y(i) = P[k];
    if (!weights.empty()) {
      detail::require(weights[k] > 0.0, "fit_fringe: weights must be > 0");
      w(i) = weights[k];
    }
  }

  const Eigen::MatrixXd Xw = w.cwiseSqrt().asDiagonal() * X;
  const Eigen::VectorXd yw = w.cwiseSqrt().asDiagonal() * y;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xw);
  qr.setThreshold(1e-10);
  detail::require(qr.rank() == 3, "fit_fringe: design matrix is rank deficient");
  const Eigen::Vector3d c = qr.solve(yw);

  const Eigen::VectorXd resid = y - X * c;
  FringeFit fit;
  fit.A = c(0);
  fit.B = std::hypot(c(1), c(2));
  fit.phi = fit.B > 0.0 ? std::atan2(-c(2), c(1)) : 0.0;
  fit.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(N));

  Eigen::Matrix3d cov = (Xw.transpose() * Xw).inverse();
  if (weights.empty()) {
    const double dof = static_cast<double>(N) - 3.0;
    cov *= dof > 0.0 ? resid.squaredNorm() / dof : 0.0;
  }
  fit.sigma_A = std::sqrt(std::max(cov(0, 0), 0.0));
  if (fit.B > 0.0) {
    const Eigen::Vector3d gB(0.0, c(1) / fit.B, c(2) / fit.B);
    const Eigen::Vector3d gphi(0.0, c(2) / (fit.B * fit.B), -c(1) / (fit.B * fit.B));
    fit.sigma_B = std::sqrt(std::max(gB.dot(cov * gB), 0.0));
    fit.sigma_phi = std::sqrt(std::max(gphi.dot(cov * gphi), 0.0));
  } else {
    fit.sigma_B = std::sqrt(std::max(cov(1, 1), 0.0));
    fit.sigma_phi = kInf;
  }
  return fit;
}

namespace {

std::vector<double> shot_weights(const std::vector<double>& p, long shots) {
  std::vector<double> w(p.size());
  const double floor = 1.0 / static_cast<double>(shots);
  for (std::size_t i = 0; i < p.size(); ++i) {
    w[i] = static_cast<double>(shots) / std::max(p[i] * (1.0 - p[i]), floor);
  }
  return w;
}

FringeFit fit_series(const FringeDataset& data, const std::vector<double>& p) {
  if (data.shots) {
    const auto w = shot_weights(p, *data.shots);
    return fit_fringe(data.phi0, p, w);
  }
  return fit_fringe(data.phi0, p);
}

}  // namespace

std::vector<std::array<FringeFit, 2>> fit_classes(const FringeDataset& data) {
  std::vector<std::array<FringeFit, 2>> fits;
  fits.reserve(data.probability.size());
  for (const auto& cls : data.probability) {
    fits.push_back({fit_fringe(data.phi0, cls[0]), fit_fringe(data.phi0, cls[1])});
  }
  return fits;
}

FringeFit fit_merged(const FringeDataset& data) { return fit_series(data, data.merged(Outcome::g)); }

double classical_fi(const FringeFit& fit, int n_minus_m, double t_int) {
  detail::require(fit.A > 0.0 && fit.A < 1.0,
                  "classical_fi: offset A must lie strictly inside (0, 1)");
  const double k = static_cast<double>(n_minus_m) * t_int;
  return k * k * fit.B * fit.B / (fit.A * (1.0 - fit.A));
}

double qjt_fi(std::span<const std::array<FringeFit, 2>> fits, int n_minus_m, double t_int) {
  double total_weight = 0.0;
  for (const auto& cls : fits) total_weight += cls[0].A + cls[1].A;
  detail::require(std::abs(total_weight - 1.0) <= 2e-2,
                  "qjt_fi: class offsets do not sum to 1 (inconsistent class probabilities)");

  const double k = static_cast<double>(n_minus_m) * t_int;
  double F = 0.0;
  for (const auto& cls : fits) {
    for (const auto& f : cls) {
      if (f.A <= 0.0) {
        detail::require(f.B <= 1e-12, "qjt_fi: class with A <= 0 carries a fringe");
        continue;
      }
      F += k * k * f.B * f.B / f.A;
    }
  }
  return F;
}

double strategy_fi(const FringeDataset& data, Strategy strategy, int n_minus_m, double t_int) {
  if (strategy == Strategy::QEC_QJT) {
    const auto fits = fit_classes(data);
    return qjt_fi(fits, n_minus_m, t_int);
  }
  return classical_fi(fit_merged(data), n_minus_m, t_int);
}

double qfi_from_derivative(const CMatrix<double>& rho, const CMatrix<double>& drho, double eps) {
  detail::require(rho.rows() == rho.cols() && drho.rows() == rho.rows() && drho.cols() == rho.cols(),
                  "qfi_from_derivative: dimension mismatch");
  const CMatrix<double> h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix<double>> es(h);
  const auto& lam = es.eigenvalues();
  const CMatrix<double> d = es.eigenvectors().adjoint() * drho * es.eigenvectors();
  double F = 0.0;
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
      const double s = lam(i) + lam(j);
      if (s > eps) F += 2.0 * std::norm(d(i, j)) / s;
    }
  }
  return F;
}

QfiEstimate true_qfi(const std::function<DensityMatrix<>(double)>& family, double omega, double delta) {
  detail::require(delta > 0.0, "true_qfi: step must be > 0");
  const CMatrix<double> rho = family(omega).elems();
  auto at_step = [&](double h) {
    const CMatrix<double> drho = (family(omega + h).elems() - family(omega - h).elems()) / (2.0 * h);
    return qfi_from_derivative(rho, drho);
  };
  QfiEstimate out;
  out.value = at_step(delta);
  out.value_half_step = at_step(delta / 2.0);
  const double scale = std::max({std::abs(out.value), std::abs(out.value_half_step), 1e-300});
  out.stable = std::abs(out.value - out.value_half_step) <= 1e-4 * scale;
  return out;
}

DensityMatrix<> direct_sum(std::span<const DensityMatrix<>> blocks) {
  detail::require(!blocks.empty(), "direct_sum: no blocks");
  Eigen::Index total = 0;
  for (const auto& b : blocks) total += b.dim();
  CMatrix<double> out = CMatrix<double>::Zero(total, total);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.block(at, at, b.dim(), b.dim()) = b.elems();
    at += b.dim();
  }
  return DensityMatrix<>(std::move(out));
}

SensitivityReport sensitivity_report(double F, double t_tot, std::optional<double> chi,
                                     Strategy strategy) {
  detail::require(F >= 0.0, "sensitivity_report: F must be >= 0");
  detail::require(t_tot > 0.0, "sensitivity_report: t_tot must be > 0");
  SensitivityReport r;
  r.F = F;
  r.t_tot = t_tot;
  r.strategy = strategy;
  r.Q = F / t_tot;
  r.sigma_omega = r.Q > 0.0 ? 1.0 / std::sqrt(r.Q) : kInf;
  if (chi) {
    detail::require(*chi > 0.0, "sensitivity_report: chi must be > 0");
    r.sigma_p = r.sigma_omega / *chi;
  }
  return r;
}

double enhancement_db(double sigma_ref, double sigma) {
  detail::require(sigma_ref > 0.0 && sigma > 0.0, "enhancement_db: sensitivities must be > 0");
  return 20.0 * std::log10(sigma_ref / sigma);
}

std::vector<double> radiometry_stencil(double h) {
  detail::require(h > 0.0, "radiometry_stencil: step must be > 0");
  return {0.0, h, 2.0 * h, 3.0 * h, 4.0 * h};
}

RadiometrySensitivity radiometry_sensitivity(const RadiometryCurves& curves, double t_tot,
                                             RadiometryMode mode) {
  detail::require(t_tot > 0.0, "radiometry_sensitivity: t_tot must be > 0");
  const auto& p = curves.p;
  detail::require(p.size() >= 5, "radiometry_sensitivity: need a 5-point stencil");
  const double h = p[1] - p[0];
  detail::require(h > 0.0, "radiometry_sensitivity: population grid must increase");
  for (std::size_t i = 1; i < 5; ++i) {
    detail::require(std::abs(p[i] - p[i - 1] - h) <= 1e-9 * std::max(h, std::abs(p[i])),
                    "radiometry_sensitivity: population grid must be uniform");
  }

  struct Slopes {
    double h1, h2, rich;
  };
  auto slopes = [&](const std::vector<double>& f) {
    Slopes s;
    s.h1 = (f[3] - f[1]) / (2.0 * h);
    s.h2 = (f[4] - f[0]) / (4.0 * h);
    s.rich = (4.0 * s.h1 - s.h2) / 3.0;
    return s;
  };
  auto agree = [](double a, double b) {
    return std::abs(a - b) <= 1e-3 * std::max(std::abs(a), std::abs(b));
  };

  RadiometrySensitivity out;
  out.p_center = p[2];
  const auto merged_g = curves.merged(Outcome::g);
  out.P_g = merged_g[2];
  const Slopes sg = slopes(merged_g);
  out.slope = sg.rich;

  if (mode == RadiometryMode::Merged) {
    if (sg.h1 == 0.0 && sg.h2 == 0.0) {
      out.slope = 0.0;
      out.sigma_p = kInf;
      return out;
    }
    detail::require(agree(sg.h1, sg.h2),
                    "radiometry_sensitivity: slope unstable between steps h and 2h; refine the grid");
    out.sigma_p = out.slope == 0.0
                      ? kInf
                      : std::sqrt(out.P_g * (1.0 - out.P_g)) * std::sqrt(t_tot) / std::abs(out.slope);
    return out;
  }

  double q1 = 0.0;
  double q2 = 0.0;
  double qr = 0.0;
  for (const auto& cls : curves.probability) {
    for (const auto& f : cls) {
      if (f[2] <= 0.0) continue;
      const Slopes s = slopes(f);
      q1 += s.h1 * s.h1 / f[2];
      q2 += s.h2 * s.h2 / f[2];
      qr += s.rich * s.rich / f[2];
    }
  }
  if (q1 == 0.0 && q2 == 0.0) {
    out.sigma_p = kInf;
    return out;
  }
  detail::require(std::abs(q1 - q2) <= 2e-3 * std::max(q1, q2),
                  "radiometry_sensitivity: slope unstable between steps h and 2h; refine the grid");
  out.sigma_p = qr > 0.0 ? std::sqrt(t_tot / qr) : kInf;
  return out;
}

}  // namespace qecsense
