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

#include "qecsense/codes.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles/brute_force.hpp"

using namespace qecsense;

TEST(codes, spec_invariants) {
  EXPECT_THROW(CodeSpec<>(3, 3, 0.6, 0.8, 0.0), std::invalid_argument);
  EXPECT_THROW(CodeSpec<>(1, 20, 0.6, 0.8, 0.0, 20), std::invalid_argument);
  EXPECT_THROW(CodeSpec<>(1, 3, 0.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(CodeSpec<>(1, 3, 0.6, 0.7, 0.0), std::invalid_argument);
  EXPECT_NO_THROW(CodeSpec<>(1, 3, 0.6, 0.8, 0.0));
  const auto c = CodeSpec<>::from_alpha(1, 5, 0.3, 1.0);
  EXPECT_NEAR(c.beta(), std::sqrt(1 - 0.09), 1e-15);
  EXPECT_EQ(c.gap(), 4);
  EXPECT_EQ(CodeSpec<>::tls().n(), 1);
}

TEST(codes, encode_places_amplitudes) {
  const auto c = CodeSpec<>::balanced(1, 3, std::numbers::pi / 2);
  const auto psi = encode(c);
  EXPECT_NEAR(std::abs(psi[1] - std::sqrt(0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(psi[3] - Complex<double>(0, std::sqrt(0.5))), 0.0, 1e-15);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-15);
}

TEST(codes, recovery_is_two_level_swaps) {
  for (auto [m, n] : {std::pair{1, 3}, {1, 5}, {1, 7}, {2, 4}, {2, 7}}) {
    const auto code = CodeSpec<>::balanced(m, n);
    const auto r = transpose_recovery(code, 1).matrix.elems();
    EXPECT_NEAR((r - oracle::recovery(20, m, n)).norm(), 0.0, 0.0) << m << "," << n;
    EXPECT_NEAR((r.adjoint() * r - CMatrix<double>::Identity(20, 20)).norm(), 0.0, 0.0);
  }
}

TEST(codes, recovery_permutation_is_bijective) {
  for (int m = 1; m < 4; ++m) {
    for (int n = m + 1; n < 9; ++n) {
      for (int j = 0; j <= m; ++j) {
        auto image = recovery_permutation(m, n, j, 10);
        EXPECT_EQ(image[m - j], m);
        EXPECT_EQ(image[n - j], n);
        std::sort(image.begin(), image.end());
        for (int k = 0; k < 10; ++k) EXPECT_EQ(image[k], k);
      }
    }
  }
}

TEST(codes, transpose_channel_matches_recovery_on_error_space) {
  const double T1 = 143e-6;
  for (auto [m, n] : {std::pair{1, 3}, {1, 5}, {2, 6}}) {
    const auto code = CodeSpec<>::from_alpha(m, n, 0.4);
    const auto ch = damping_kraus<double>(0.1 * T1, T1, 20, 19);
    const auto tc = transpose_channel_kraus(code, ch.op(1)).elems();
    const auto r = transpose_recovery(code, 1).matrix.elems();
    const std::array<Eigen::Index, 2> err{m - 1, n - 1};
    const auto p_err = fock_projector<double>(err, 20).elems();
    EXPECT_NEAR((tc - r * p_err).norm(), 0.0, 1e-12) << m << "," << n;
  }
}

TEST(codes, loss_beyond_m_is_uncorrectable) {
  EXPECT_THROW(transpose_recovery(CodeSpec<>::balanced(1, 3), 2), std::invalid_argument);
  EXPECT_NO_THROW(transpose_recovery(CodeSpec<>::balanced(2, 6), 2));
}

TEST(codes, single_loss_then_recovery_restores_phase) {
  const auto code = CodeSpec<>::balanced(1, 3, std::numbers::pi / 2);
  const auto out = transpose_recovery(code, 1).matrix * (annihilation<double>(20) * encode(code));
  EXPECT_NEAR(std::arg(out[3] / out[1]), std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(std::abs(out[3] / out[1]), std::sqrt(3.0), 1e-12);
}

TEST(codes, decode_povm_fringe) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 2 * std::numbers::pi);
  for (int trial = 0; trial < 20; ++trial) {
    const double theta = u(rng);
    const double phi1 = 0.3 * trial;
    const auto code = CodeSpec<>::from_alpha(1, 4, 0.2 + 0.03 * trial, theta);
    const auto povm = decode_povm(code, phi1);
    const CMatrix<double> sum = povm.Pi_g.elems() + povm.Pi_e.elems();
    EXPECT_NEAR((sum - CMatrix<double>::Identity(20, 20)).norm(), 0.0, 1e-14);
    EXPECT_GE(DensityMatrix<>(povm.Pi_e.elems()).min_eigenvalue(), -1e-14);
    const double pg = expectation(encode(code), povm.Pi_g).real();
    EXPECT_NEAR(pg, 0.5 + code.alpha() * code.beta() * std::cos(theta - phi1), 1e-14);
  }
}

TEST(codes, amplitudes_after_round_closed_form) {
  const auto code = CodeSpec<>::from_alpha(1, 3, 0.6, 0.4);
  const auto g = amplitudes_after_round(code, Outcome::g, 14.3e-6, 143e-6);
  const auto e = amplitudes_after_round(code, Outcome::e, 14.3e-6, 143e-6);
  EXPECT_NEAR(g.alpha * g.alpha + g.beta * g.beta, 1.0, 1e-15);
  EXPECT_NEAR(g.beta / g.alpha, 0.8 / 0.6 * std::exp(-0.1), 1e-14);
  EXPECT_NEAR(e.beta / e.alpha, std::sqrt(3.0) * 0.8 / 0.6 * std::exp(-0.1), 1e-14);
  EXPECT_EQ(g.phase, 0.4);
  EXPECT_THROW(amplitudes_after_round(CodeSpec<>::balanced(0, 2), Outcome::e, 1e-6, 1e-4),
               std::invalid_argument);
}
