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

#include <cmath>
#include <sstream>
#include <vector>

#include "qecsense/hilbert.hpp"

namespace qecsense {

/// Photon-loss channel over an interval t for a mode with lifetime T1.
///
/// ops[k] = ((1 - e^{-t/T1})^{k/2} / sqrt(k!)) e^{-t n / 2T1} a^k, k = 0..k_max.
/// An optional pure-dephasing rate multiplies coherence |i><j| by
/// exp(-rate t (i-j)^2 / 2); it commutes with loss.
template <typename Real = double>
class KrausChannel {
 public:
  KrausChannel(std::vector<FockOperator<Real>> ops, Real t, Real T1, int k_max, Real dephasing_rate)
      : ops_(std::move(ops)), t_(t), T1_(T1), k_max_(k_max), dephasing_rate_(dephasing_rate) {}

  Eigen::Index dim() const { return ops_.front().dim(); }
  const std::vector<FockOperator<Real>>& ops() const { return ops_; }
  const FockOperator<Real>& op(int k) const { return ops_.at(static_cast<std::size_t>(k)); }
  Real t() const { return t_; }
  Real T1() const { return T1_; }
  int k_max() const { return k_max_; }
  Real dephasing_rate() const { return dephasing_rate_; }

  /// sum_k E_k^dag E_k - I on levels 0..n_max, Frobenius norm.
  Real completeness_defect(Eigen::Index n_max) const {
    const Eigen::Index k = std::min(n_max + 1, dim());
    CMatrix<Real> s = -CMatrix<Real>::Identity(k, k);
    for (const auto& e : ops_) {
      s += (e.elems().adjoint() * e.elems()).topLeftCorner(k, k);
    }
    return s.norm();
  }

 private:
  std::vector<FockOperator<Real>> ops_;
  Real t_;
  Real T1_;
  int k_max_;
  Real dephasing_rate_;
};

/// exp(-i omega t n).
template <typename Real = double>
class PhaseUnitary {
 public:
  PhaseUnitary(Real omega, Real t, Eigen::Index dim)
      : omega_(omega), t_(t), diag_(dim) {
    for (Eigen::Index k = 0; k < dim; ++k) diag_(k) = std::polar(Real(1), -omega * t * Real(k));
  }

  Eigen::Index dim() const { return diag_.size(); }
  Real omega() const { return omega_; }
  Real t() const { return t_; }
  const CVector<Real>& diagonal() const { return diag_; }
  FockOperator<Real> op() const { return FockOperator<Real>(diag_.asDiagonal().toDenseMatrix()); }

 private:
  Real omega_;
  Real t_;
  CVector<Real> diag_;
};

template <typename Real = double>
KrausChannel<Real> damping_kraus(Real t, Real T1, Eigen::Index dim, int k_max,
                                 Real dephasing_rate = Real(0)) {
  detail::require(t >= Real(0), "damping_kraus: duration must be >= 0");
  detail::require(T1 > Real(0), "damping_kraus: T1 must be > 0");
  detail::require(dim >= 2, "damping_kraus: dim must be >= 2");
  detail::require(k_max >= 0 && k_max < dim, "damping_kraus: need 0 <= k_max < dim");
  detail::require(dephasing_rate >= Real(0), "damping_kraus: dephasing rate must be >= 0");

  const Real loss = -std::expm1(-t / T1);  // 1 - e^{-t/T1}
  CVector<Real> decay(dim);
  for (Eigen::Index j = 0; j < dim; ++j) decay(j) = std::exp(-t * Real(j) / (Real(2) * T1));
  const CMatrix<Real> a = annihilation<Real>(dim).elems();

  std::vector<FockOperator<Real>> ops;
  ops.reserve(static_cast<std::size_t>(k_max) + 1);
  CMatrix<Real> a_pow = CMatrix<Real>::Identity(dim, dim);
  Real factorial = 1;
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) {
      a_pow = a_pow * a;
      factorial *= Real(k);
    }
    const Real pref = std::pow(loss, Real(k) / Real(2)) / std::sqrt(factorial);
    ops.emplace_back(CMatrix<Real>(pref * (decay.asDiagonal() * a_pow)));
  }
  return KrausChannel<Real>(std::move(ops), t, T1, k_max, dephasing_rate);
}

template <typename Real = double>
PhaseUnitary<Real> phase_unitary(Real omega, Real t, Eigen::Index dim) {
  detail::require(t >= Real(0), "phase_unitary: duration must be >= 0");
  detail::require(dim >= 2, "phase_unitary: dim must be >= 2");
  return PhaseUnitary<Real>(omega, t, dim);
}

/// E rho E^dag.
template <typename Real>
CMatrix<Real> sandwich(const CMatrix<Real>& e, const CMatrix<Real>& rho) {
  return e * rho * e.adjoint();
}

/// Unchecked sum_k E_k X E_k^dag (plus dephasing) for any operator X.
///
/// E_k annihilates every level below k, so terms with k above the highest
/// level X touches are skipped.
template <typename Real>
CMatrix<Real> kraus_sum(const KrausChannel<Real>& ch, const CMatrix<Real>& x) {
  detail::require(x.rows() == ch.dim() && x.cols() == ch.dim(), "kraus_sum: dimension mismatch");
  Eigen::Index top = 0;
  for (Eigen::Index k = x.rows() - 1; k > 0; --k) {
    if (x.row(k).cwiseAbs().maxCoeff() > Real(0) || x.col(k).cwiseAbs().maxCoeff() > Real(0)) {
      top = k;
      break;
    }
  }
  CMatrix<Real> out = CMatrix<Real>::Zero(x.rows(), x.cols());
  const int last = static_cast<int>(std::min<Eigen::Index>(ch.k_max(), top));
  for (int k = 0; k <= last; ++k) out += sandwich(ch.op(k).elems(), x);

  if (ch.dephasing_rate() > Real(0)) {
    const Real g = ch.dephasing_rate() * ch.t() / Real(2);
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const Real d = Real(i - j);
        out(i, j) *= std::exp(-g * d * d);
      }
    }
  }
  return out;
}

/// sum_k E_k rho E_k^dag, renormalized to the input trace.
///
/// Throws TruncationError when the Kraus family is incomplete (defect >= 1e-8)
/// on the levels rho occupies.
template <typename Real>
DensityMatrix<Real> apply_channel(const DensityMatrix<Real>& rho, const KrausChannel<Real>& ch) {
  detail::require(rho.dim() == ch.dim(), "apply_channel: dimension mismatch");
  const Eigen::Index top = rho.highest_occupied();
  const Real defect = ch.completeness_defect(top);
  if (!(defect < Real(1e-8))) {
    std::ostringstream msg;
    msg << "apply_channel: loss family truncated at k_max=" << ch.k_max()
        << " is incomplete on occupied levels 0.." << top << " (defect " << defect << ")";
    throw TruncationError(msg.str());
  }
  CMatrix<Real> out = kraus_sum(ch, rho.elems());
  const Real tr_out = out.trace().real();
  if (tr_out > Real(0)) out *= rho.trace() / tr_out;
  return DensityMatrix<Real>(std::move(out));
}

template <typename Real>
DensityMatrix<Real> apply_channel(const DensityMatrix<Real>& rho, const PhaseUnitary<Real>& u) {
  detail::require(rho.dim() == u.dim(), "apply_channel: dimension mismatch");
  const auto& d = u.diagonal();
  return DensityMatrix<Real>(d.asDiagonal() * rho.elems() * d.conjugate().asDiagonal());
}

/// Frobenius norm of [E_k, n] for each Kraus operator. Nonzero for k >= 1:
/// loss does not commute with the sensing Hamiltonian.
template <typename Real>
std::vector<Real> commutes_with_sensing_check(const KrausChannel<Real>& ch) {
  const CMatrix<Real> n = number_operator<Real>(ch.dim()).elems();
  std::vector<Real> norms;
  norms.reserve(ch.ops().size());
  for (const auto& e : ch.ops()) norms.push_back((e.elems() * n - n * e.elems()).norm());
  return norms;
}

template <typename Real>
Real commutes_with_sensing_check(const PhaseUnitary<Real>& u) {
  const CMatrix<Real> n = number_operator<Real>(u.dim()).elems();
  const CMatrix<Real> m = u.op().elems();
  return (m * n - n * m).norm();
}

}  // namespace qecsense
