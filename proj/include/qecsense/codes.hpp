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

// Two-component Fock codes span{|m>, |n>}.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "qecsense/channels.hpp"

namespace qecsense {

enum class Outcome { g = 0, e = 1 };

inline const char* to_string(Outcome o) { return o == Outcome::g ? "g" : "e"; }

template <typename Real = double>
class CodeSpec {
 public:
  CodeSpec(int m, int n, Real alpha, Real beta, Real phi0, Eigen::Index dim = kDefaultDim)
      : m_(m), n_(n), alpha_(alpha), beta_(beta), phi0_(phi0), dim_(dim) {
    detail::require(m >= 0 && m < n, "CodeSpec: need 0 <= m < n");
    detail::require(n < dim, "CodeSpec: n=" + std::to_string(n) + " does not fit in dim=" +
                                 std::to_string(dim));
    detail::require(alpha > Real(0) && alpha < Real(1) && beta > Real(0) && beta < Real(1),
                    "CodeSpec: amplitudes must lie in (0, 1)");
    detail::require(std::abs(alpha * alpha + beta * beta - Real(1)) <= Real(1e-12),
                    "CodeSpec: alpha^2 + beta^2 must equal 1");
  }

  /// beta = sqrt(1 - alpha^2).
  static CodeSpec from_alpha(int m, int n, Real alpha, Real phi0 = Real(0),
                             Eigen::Index dim = kDefaultDim) {
    return CodeSpec(m, n, alpha, std::sqrt(Real(1) - alpha * alpha), phi0, dim);
  }

  static CodeSpec balanced(int m, int n, Real phi0 = Real(0), Eigen::Index dim = kDefaultDim) {
    const Real h = std::sqrt(Real(0.5));
    return CodeSpec(m, n, h, h, phi0, dim);
  }

  /// The (0, 1) baseline encoding.
  static CodeSpec tls(Real phi0 = Real(0), Eigen::Index dim = kDefaultDim) {
    return balanced(0, 1, phi0, dim);
  }

  int m() const { return m_; }
  int n() const { return n_; }
  int gap() const { return n_ - m_; }
  Real alpha() const { return alpha_; }
  Real beta() const { return beta_; }
  Real phi0() const { return phi0_; }
  Eigen::Index dim() const { return dim_; }

  CodeSpec with_phi0(Real phi0) const { return CodeSpec(m_, n_, alpha_, beta_, phi0, dim_); }
  CodeSpec with_alpha(Real alpha) const { return from_alpha(m_, n_, alpha, phi0_, dim_); }
  CodeSpec with_dim(Eigen::Index dim) const { return CodeSpec(m_, n_, alpha_, beta_, phi0_, dim); }

 private:
  int m_;
  int n_;
  Real alpha_;
  Real beta_;
  Real phi0_;
  Eigen::Index dim_;
};

/// alpha|m> + beta e^{i phi0}|n>.
template <typename Real>
StateVector<Real> encode(const CodeSpec<Real>& code) {
  CVector<Real> amps = CVector<Real>::Zero(code.dim());
  amps(code.m()) = code.alpha();
  amps(code.n()) = std::polar(code.beta(), code.phi0());
  return StateVector<Real>(std::move(amps));
}

template <typename Real = double>
struct RecoveryUnitary {
  int j = 0;
  FockOperator<Real> matrix;
};

/// Basis permutation of the recovery R_j.
///
/// |m-j> -> |m>, |n-j> -> |n>; the levels this frees up ({m, n} minus the
/// error levels) go back to the vacated error levels in ascending order, and
/// every other level is fixed.
inline std::vector<Eigen::Index> recovery_permutation(int m, int n, int j, Eigen::Index dim) {
  std::vector<Eigen::Index> image(static_cast<std::size_t>(dim), -1);
  const std::array<Eigen::Index, 2> src{m - j, n - j};
  const std::array<Eigen::Index, 2> dst{m, n};
  image[static_cast<std::size_t>(src[0])] = dst[0];
  image[static_cast<std::size_t>(src[1])] = dst[1];

  std::set<Eigen::Index> free_dst;
  for (Eigen::Index k = 0; k < dim; ++k) free_dst.insert(k);
  free_dst.erase(dst[0]);
  free_dst.erase(dst[1]);

  std::vector<Eigen::Index> pending;
  for (Eigen::Index k = 0; k < dim; ++k) {
    if (image[static_cast<std::size_t>(k)] >= 0) continue;
    if (free_dst.count(k)) {
      image[static_cast<std::size_t>(k)] = k;
      free_dst.erase(k);
    } else {
      pending.push_back(k);
    }
  }
  auto it = free_dst.begin();
  for (Eigen::Index k : pending) image[static_cast<std::size_t>(k)] = *it++;
  return image;
}

template <typename Real>
RecoveryUnitary<Real> transpose_recovery(const CodeSpec<Real>& code, int j) {
  detail::require(j >= 0, "transpose_recovery: loss order must be >= 0");
  detail::require(j <= code.m(), "transpose_recovery: a " + std::to_string(j) +
                                     "-photon loss is uncorrectable for m=" +
                                     std::to_string(code.m()));
  const auto image = recovery_permutation(code.m(), code.n(), j, code.dim());
  CMatrix<Real> r = CMatrix<Real>::Zero(code.dim(), code.dim());
  for (Eigen::Index k = 0; k < code.dim(); ++k) r(image[static_cast<std::size_t>(k)], k) = Real(1);
  return RecoveryUnitary<Real>{j, FockOperator<Real>(std::move(r))};
}

/// Transpose-channel Kraus operator P E^dag (E P E^dag)^{-1/2} for one error E
/// (pseudo-inverse on the support). For a two-component Fock code and a
/// k-photon loss this is the partial isometry |m><m-k| + |n><n-k|.
template <typename Real>
FockOperator<Real> transpose_channel_kraus(const CodeSpec<Real>& code, const FockOperator<Real>& error) {
  detail::require(error.dim() == code.dim(), "transpose_channel_kraus: dimension mismatch");
  const std::array<Eigen::Index, 2> levels{code.m(), code.n()};
  const CMatrix<Real> p = fock_projector<Real>(levels, code.dim()).elems();
  const CMatrix<Real> e = error.elems();
  const CMatrix<Real> image = e * p * e.adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(image);
  const Real cutoff = Real(1e-12) * std::max(Real(1), es.eigenvalues().cwiseAbs().maxCoeff());
  RVector<Real> inv_sqrt(image.rows());
  for (Eigen::Index k = 0; k < image.rows(); ++k) {
    const Real lam = es.eigenvalues()(k);
    inv_sqrt(k) = lam > cutoff ? Real(1) / std::sqrt(lam) : Real(0);
  }
  const CMatrix<Real> root = es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint();
  return FockOperator<Real>(p * e.adjoint() * root);
}

template <typename Real = double>
struct DecodePovm {
  Real phi1 = 0;
  FockOperator<Real> Pi_g;
  FockOperator<Real> Pi_e;
};

/// Pi_g = |d><d| + (I - P_code)/2 with |d> = (|m> + e^{i phi1}|n>)/sqrt(2).
/// For alpha|m> + beta e^{i theta}|n>, P_g = 1/2 + alpha beta cos(theta - phi1);
/// population outside the code space splits evenly.
template <typename Real>
DecodePovm<Real> decode_povm(const CodeSpec<Real>& code, Real phi1 = Real(0)) {
  const Eigen::Index dim = code.dim();
  CVector<Real> d = CVector<Real>::Zero(dim);
  const Real h = std::sqrt(Real(0.5));
  d(code.m()) = h;
  d(code.n()) = std::polar(h, phi1);
  CMatrix<Real> pi_g = d * d.adjoint();
  for (Eigen::Index k = 0; k < dim; ++k) {
    if (k != code.m() && k != code.n()) pi_g(k, k) += Real(0.5);
  }
  CMatrix<Real> pi_e = CMatrix<Real>::Identity(dim, dim) - pi_g;
  return DecodePovm<Real>{phi1, FockOperator<Real>(std::move(pi_g)), FockOperator<Real>(std::move(pi_e))};
}

template <typename Real = double>
struct AmplitudeUpdate {
  Real alpha = 0;
  Real beta = 0;
  Real phase = 0;
};

/// Code amplitudes after one round (loss of order 0 or 1, then R_1), ignoring
/// normalization in the closed form and normalizing the result:
///   g: (alpha, beta e^{-(n-m) tau / 2T1})
///   e: (alpha, sqrt(n/m) beta e^{-(n-m) tau / 2T1})
template <typename Real>
AmplitudeUpdate<Real> amplitudes_after_round(const CodeSpec<Real>& code, Outcome outcome, Real tau,
                                             Real T1) {
  detail::require(tau >= Real(0) && T1 > Real(0), "amplitudes_after_round: need tau >= 0, T1 > 0");
  Real beta = code.beta() * std::exp(-Real(code.gap()) * tau / (Real(2) * T1));
  if (outcome == Outcome::e) {
    detail::require(code.m() >= 1, "amplitudes_after_round: outcome e is uncorrectable for m=0");
    beta *= std::sqrt(Real(code.n()) / Real(code.m()));
  }
  const Real nrm = std::hypot(code.alpha(), beta);
  return AmplitudeUpdate<Real>{code.alpha() / nrm, beta / nrm, code.phi0()};
}

}  // namespace qecsense
