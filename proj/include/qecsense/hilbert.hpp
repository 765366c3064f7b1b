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

// Truncated Fock-space linear algebra for a single bosonic mode.
//
// States and operators live on the basis |0>..|dim-1>. Everything here is
// templated on the real scalar; `double` is what the rest of the library
// instantiates.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qecsense/types.hpp"

namespace qecsense {

template <typename Real = double>
class StateVector {
 public:
  explicit StateVector(CVector<Real> amps) : amps_(std::move(amps)) {
    detail::require(amps_.size() >= 2, "StateVector: dim must be >= 2");
  }

  Eigen::Index dim() const { return amps_.size(); }
  const CVector<Real>& amps() const { return amps_; }
  Complex<Real> operator[](Eigen::Index k) const { return amps_(k); }
  Real norm() const { return amps_.norm(); }

  StateVector normalized() const {
    const Real nrm = norm();
    detail::require(nrm > Real(0), "StateVector: cannot normalize the zero vector");
    return StateVector(amps_ / nrm);
  }

 private:
  CVector<Real> amps_;
};

template <typename Real = double>
class FockOperator {
 public:
  explicit FockOperator(CMatrix<Real> elems) : elems_(std::move(elems)) {
    detail::require(elems_.rows() == elems_.cols(), "FockOperator: matrix must be square");
    detail::require(elems_.rows() >= 2, "FockOperator: dim must be >= 2");
  }

  static FockOperator identity(Eigen::Index dim) {
    return FockOperator(CMatrix<Real>::Identity(dim, dim));
  }

  Eigen::Index dim() const { return elems_.rows(); }
  const CMatrix<Real>& elems() const { return elems_; }
  FockOperator adjoint() const { return FockOperator(elems_.adjoint()); }

  friend FockOperator operator*(const FockOperator& lhs, const FockOperator& rhs) {
    detail::require(lhs.dim() == rhs.dim(), "FockOperator: dimension mismatch");
    return FockOperator(lhs.elems_ * rhs.elems_);
  }

  friend StateVector<Real> operator*(const FockOperator& op, const StateVector<Real>& ket) {
    detail::require(op.dim() == ket.dim(), "FockOperator: dimension mismatch");
    return StateVector<Real>(op.elems_ * ket.amps());
  }

 private:
  CMatrix<Real> elems_;
};

/// Density operator on the truncated space. Conditional (unnormalized)
/// states produced by instruments are also carried in this type.
template <typename Real = double>
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix<Real> elems) : elems_(std::move(elems)) {
    detail::require(elems_.rows() == elems_.cols(), "DensityMatrix: matrix must be square");
    detail::require(elems_.rows() >= 2, "DensityMatrix: dim must be >= 2");
  }

  explicit DensityMatrix(const StateVector<Real>& ket)
      : elems_(ket.amps() * ket.amps().adjoint()) {}

  Eigen::Index dim() const { return elems_.rows(); }
  const CMatrix<Real>& elems() const { return elems_; }
  Complex<Real> operator()(Eigen::Index i, Eigen::Index j) const { return elems_(i, j); }
  Real trace() const { return elems_.trace().real(); }

  DensityMatrix normalized() const {
    const Real tr = trace();
    detail::require(tr > Real(0), "DensityMatrix: cannot normalize a zero-trace operator");
    return DensityMatrix(elems_ / tr);
  }

  bool is_hermitian(Real tol) const {
    return (elems_ - elems_.adjoint()).cwiseAbs().maxCoeff() <= tol;
  }

  /// Smallest eigenvalue of the Hermitian part.
  Real min_eigenvalue() const {
    const CMatrix<Real> herm = (elems_ + elems_.adjoint()) / Real(2);
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  /// Highest Fock level whose population exceeds `tol` (0 for vacuum-only).
  Eigen::Index highest_occupied(Real tol = Real(1e-14)) const {
    for (Eigen::Index k = dim() - 1; k > 0; --k) {
      if (std::abs(elems_(k, k)) > tol) return k;
    }
    return 0;
  }

 private:
  CMatrix<Real> elems_;
};

template <typename Real = double>
StateVector<Real> fock_ket(Eigen::Index k, Eigen::Index dim) {
  detail::require(dim >= 2, "fock_ket: dim must be >= 2");
  detail::require(k >= 0 && k < dim, "fock_ket: index " + std::to_string(k) +
                                         " outside basis |0>..|" + std::to_string(dim - 1) + ">");
  CVector<Real> amps = CVector<Real>::Zero(dim);
  amps(k) = Real(1);
  return StateVector<Real>(std::move(amps));
}

template <typename Real = double>
FockOperator<Real> annihilation(Eigen::Index dim) {
  detail::require(dim >= 2, "annihilation: dim must be >= 2");
  CMatrix<Real> a = CMatrix<Real>::Zero(dim, dim);
  for (Eigen::Index k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(Real(k));
  return FockOperator<Real>(std::move(a));
}

template <typename Real = double>
FockOperator<Real> creation(Eigen::Index dim) {
  return annihilation<Real>(dim).adjoint();
}

/// a^dagger a, built directly as diag(0, 1, ..., dim-1) so the spectrum is exact.
template <typename Real = double>
FockOperator<Real> number_operator(Eigen::Index dim) {
  detail::require(dim >= 2, "number_operator: dim must be >= 2");
  CMatrix<Real> n = CMatrix<Real>::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) n(k, k) = Real(k);
  return FockOperator<Real>(std::move(n));
}

/// (-1)^n.
template <typename Real = double>
FockOperator<Real> parity(Eigen::Index dim) {
  detail::require(dim >= 2, "parity: dim must be >= 2");
  CMatrix<Real> p = CMatrix<Real>::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) p(k, k) = (k % 2 == 0) ? Real(1) : Real(-1);
  return FockOperator<Real>(std::move(p));
}

/// Orthogonal projector onto span{|k> : k in levels}.
template <typename Real = double>
FockOperator<Real> fock_projector(std::span<const Eigen::Index> levels, Eigen::Index dim) {
  CMatrix<Real> p = CMatrix<Real>::Zero(dim, dim);
  for (Eigen::Index k : levels) {
    detail::require(k >= 0 && k < dim, "fock_projector: level out of range");
    p(k, k) = Real(1);
  }
  return FockOperator<Real>(std::move(p));
}

template <typename Real>
Complex<Real> expectation(const DensityMatrix<Real>& rho, const FockOperator<Real>& op) {
  detail::require(rho.dim() == op.dim(), "expectation: dimension mismatch");
  return (rho.elems() * op.elems()).trace();
}

template <typename Real>
Complex<Real> expectation(const StateVector<Real>& psi, const FockOperator<Real>& op) {
  detail::require(psi.dim() == op.dim(), "expectation: dimension mismatch");
  return psi.amps().dot(op.elems() * psi.amps());
}

/// Population on levels >= dim - levels.
template <typename Real>
Real truncation_tail(const DensityMatrix<Real>& rho, Eigen::Index levels = 2) {
  Real tail = 0;
  for (Eigen::Index k = std::max<Eigen::Index>(0, rho.dim() - levels); k < rho.dim(); ++k) {
    tail += rho(k, k).real();
  }
  return tail;
}

/// Zero-pad (or crop) an operator to `dim` levels.
template <typename Real>
CMatrix<Real> embed(const CMatrix<Real>& m, Eigen::Index dim) {
  CMatrix<Real> out = CMatrix<Real>::Zero(dim, dim);
  const Eigen::Index k = std::min(dim, m.rows());
  out.topLeftCorner(k, k) = m.topLeftCorner(k, k);
  return out;
}

/// Spectral form of the displacement generator.
///
/// beta a^dag - beta^* a = -i |beta| U_theta X U_theta^dag with X = i(a^dag - a)
/// Hermitian and U_theta = exp(i theta n). One eigendecomposition of X then
/// yields D(beta) for every beta at the same truncation.
template <typename Real = double>
class DisplacementGenerator {
 public:
  explicit DisplacementGenerator(Eigen::Index dim) : dim_(dim) {
    const CMatrix<Real> a = annihilation<Real>(dim).elems();
    const CMatrix<Real> x = Complex<Real>(0, 1) * (a.adjoint() - a);
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(x);
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors();
  }

  Eigen::Index dim() const { return dim_; }

  /// exp(beta a^dag - beta^* a) on the truncated space.
  CMatrix<Real> operator()(Complex<Real> beta) const {
    const Real r = std::abs(beta);
    const Real theta = std::arg(beta);
    CVector<Real> phases(dim_);
    for (Eigen::Index k = 0; k < dim_; ++k) phases(k) = std::polar(Real(1), theta * Real(k));
    CVector<Real> spec(dim_);
    for (Eigen::Index k = 0; k < dim_; ++k) spec(k) = std::polar(Real(1), -r * evals_(k));
    const CMatrix<Real> rotated = phases.asDiagonal() * evecs_;
    return rotated * spec.asDiagonal() * rotated.adjoint();
  }

 private:
  Eigen::Index dim_;
  RVector<Real> evals_;
  CMatrix<Real> evecs_;
};

template <typename Real = double>
FockOperator<Real> displacement(Complex<Real> beta, Eigen::Index dim) {
  detail::require(dim >= 2, "displacement: dim must be >= 2");
  return FockOperator<Real>(DisplacementGenerator<Real>(dim)(beta));
}

template <typename Real = double>
struct WignerResult {
  std::vector<Real> values;
  Eigen::Index working_dim = 0;
  /// Set when more than 1e-6 of the population sits on the top two levels.
  bool truncation_warning = false;
};

/// Working truncation large enough that displacing a state supported on
/// levels <= highest by |beta| <= radius is converged to ~1e-7.
inline Eigen::Index wigner_working_dim(Eigen::Index dim, Eigen::Index highest, double radius) {
  const double need = 2.5 * radius * radius + 4.0 * static_cast<double>(highest) + 20.0;
  return std::max(dim, static_cast<Eigen::Index>(std::ceil(need)));
}

/// W(beta) = (2/pi) Tr[D(-beta) rho D(beta) P] with P the photon parity.
///
/// rho is zero-padded to a working truncation chosen from the grid radius
/// (see wigner_working_dim) before displacing; pass working_dim > 0 to fix it.
template <typename Real>
WignerResult<Real> wigner(const DensityMatrix<Real>& rho, std::span<const Complex<Real>> grid,
                          Eigen::Index working_dim = 0) {
  detail::require(!grid.empty(), "wigner: empty phase-space grid");
  WignerResult<Real> out;
  out.truncation_warning = truncation_tail(rho, 2) >= Real(1e-6);

  const Eigen::Index top = rho.highest_occupied();
  Real radius = 0;
  for (const auto& b : grid) radius = std::max(radius, std::abs(b));
  out.working_dim = working_dim > 0
                        ? std::max(working_dim, rho.dim())
                        : wigner_working_dim(rho.dim(), top, static_cast<double>(radius));
  const Eigen::Index w = out.working_dim;
  const Eigen::Index cols = top + 1;

  const DisplacementGenerator<Real> gen(w);
  const CMatrix<Real> rho_block = rho.elems().topLeftCorner(cols, cols);
  RVector<Real> par(w);
  for (Eigen::Index k = 0; k < w; ++k) par(k) = (k % 2 == 0) ? Real(1) : Real(-1);

  out.values.reserve(grid.size());
  for (const auto& beta : grid) {
    // D(-beta) rho D(-beta)^dag restricted to the occupied columns.
    const CMatrix<Real> d = gen(-beta).leftCols(cols);
    const CMatrix<Real> shifted = d * rho_block * d.adjoint();
    Real acc = 0;
    for (Eigen::Index k = 0; k < w; ++k) acc += par(k) * shifted(k, k).real();
    out.values.push_back(Real(2) / std::numbers::pi_v<Real> * acc);
  }
  return out;
}

}  // namespace qecsense
