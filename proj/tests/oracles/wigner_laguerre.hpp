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

// Test-only reference: Wigner function of a Fock-basis density matrix from
// the closed-form Laguerre expansion of each |m><n| term.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>

namespace oracle {

inline double wigner_laguerre(const Eigen::MatrixXcd& rho, std::complex<double> beta) {
  const double r2 = std::norm(beta);
  const double gauss = std::exp(-2.0 * r2);
  std::complex<double> acc = 0.0;
  for (int m = 0; m < rho.rows(); ++m) {
    for (int n = 0; n < rho.cols(); ++n) {
      if (rho(m, n) == 0.0) continue;
      const int lo = std::min(m, n);
      const int d = std::abs(n - m);
      const std::complex<double> b = n >= m ? 2.0 * beta : 2.0 * std::conj(beta);
      const double sign = lo % 2 == 0 ? 1.0 : -1.0;
      const double ratio = std::exp(0.5 * (std::lgamma(lo + 1.0) - std::lgamma(lo + d + 1.0)));
      const double lag = std::assoc_laguerre(static_cast<unsigned>(lo), static_cast<unsigned>(d), 4.0 * r2);
      std::complex<double> bd = 1.0;
      for (int k = 0; k < d; ++k) bd *= b;
      acc += rho(m, n) * sign * ratio * bd * lag * gauss;
    }
  }
  return 2.0 / std::numbers::pi * acc.real();
}

}  // namespace oracle
