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

#include <random>

#include "qecsense/hilbert.hpp"

namespace testing_support {

/// Random mixed state on levels 0..levels-1, zero-padded to dim.
inline qecsense::DensityMatrix<> random_state(std::mt19937_64& rng, Eigen::Index dim, Eigen::Index levels,
                                               int rank = 3) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, rank);
  for (Eigen::Index r = 0; r < levels; ++r) {
    for (int c = 0; c < rank; ++c) a(r, c) = {g(rng), g(rng)};
  }
  Eigen::MatrixXcd rho = a * a.adjoint();
  rho /= rho.trace().real();
  return qecsense::DensityMatrix<>(rho);
}

inline qecsense::StateVector<> random_ket(std::mt19937_64& rng, Eigen::Index dim, Eigen::Index levels) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  for (Eigen::Index r = 0; r < levels; ++r) v(r) = {g(rng), g(rng)};
  return qecsense::StateVector<>(v).normalized();
}

}  // namespace testing_support
