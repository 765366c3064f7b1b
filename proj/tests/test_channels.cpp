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

#include "qecsense/channels.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles/brute_force.hpp"
#include "oracles/lindblad_rk4.hpp"
#include "support.hpp"

using namespace qecsense;

namespace {
constexpr double kT1 = 143e-6;
}

TEST(channels, full_family_is_complete) {
  for (double f : {0.01, 0.1, 0.5, 2.0}) {
    const auto ch = damping_kraus<double>(f * kT1, kT1, 20, 19);
    EXPECT_LT(ch.completeness_defect(19), 1e-12) << f;
  }
}

TEST(channels, diagonal_weights_are_binomial) {
  const double t = 0.3 * kT1;
  const double p = 1.0 - std::exp(-t / kT1);
  const auto ch = damping_kraus<double>(t, kT1, 12, 11);
  for (int k = 0; k < 12; ++k) {
    const CMatrix<double> ee = ch.op(k).elems().adjoint() * ch.op(k).elems();
    for (int j = k; j < 12; ++j) {
      const double expect = oracle::binomial(j, k) * std::pow(p, k) * std::pow(1 - p, j - k);
      EXPECT_NEAR(ee(j, j).real(), expect, 1e-14);
    }
  }
}

TEST(channels, matches_independent_kraus_construction) {
  const double t = 0.2 * kT1;
  const auto ch = damping_kraus<double>(t, kT1, 15, 14);
  const auto ref = oracle::loss_kraus(15, t, kT1);
  for (int k = 0; k < 15; ++k) EXPECT_NEAR((ch.op(k).elems() - ref[k]).norm(), 0.0, 1e-14) << k;
}

TEST(channels, short_truncation_is_incomplete_and_rejected) {
  const auto ch = damping_kraus<double>(0.1 * kT1, kT1, 20, 4);
  EXPECT_GT(ch.completeness_defect(12), 1e-8);
  EXPECT_LT(ch.completeness_defect(4), 1e-14);
  const DensityMatrix<> high(fock_ket<double>(12, 20));
  EXPECT_THROW(apply_channel(high, ch), TruncationError);
  const DensityMatrix<> low(fock_ket<double>(3, 20));
  EXPECT_NO_THROW(apply_channel(low, ch));
}

TEST(channels, agrees_with_master_equation) {
  std::mt19937_64 rng(3);
  for (double f : {0.05, 0.5}) {
    const double t = f * kT1;
    const auto rho = testing_support::random_state(rng, 12, 12);
    const auto ch = damping_kraus<double>(t, kT1, 12, 11);
    const auto out = apply_channel(rho, ch);
    const auto ref = oracle::lindblad_rk4(rho.elems(), kT1, 0.0, t, 2000);
    EXPECT_LT(oracle::trace_distance(out.elems(), ref), 1e-8) << f;
  }
}

TEST(channels, trace_preserving_positive_and_downward) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index levels = 1 + trial % 10;
    const auto rho = testing_support::random_state(rng, 14, levels);
    const auto ch = damping_kraus<double>((0.02 + 0.1 * trial) * kT1, kT1, 14, 13);
    const auto out = apply_channel(rho, ch);
    EXPECT_NEAR(out.trace(), 1.0, 1e-12);
    EXPECT_GE(out.min_eigenvalue(), -1e-12);
    EXPECT_LE(out.highest_occupied(1e-13), rho.highest_occupied(1e-13));
  }
}

TEST(channels, semigroup_composition) {
  std::mt19937_64 rng(9);
  const auto rho = testing_support::random_state(rng, 10, 10);
  const auto a = damping_kraus<double>(0.1 * kT1, kT1, 10, 9);
  const auto b = damping_kraus<double>(0.25 * kT1, kT1, 10, 9);
  const auto ab = damping_kraus<double>(0.35 * kT1, kT1, 10, 9);
  const auto two_step = apply_channel(apply_channel(rho, a), b);
  EXPECT_NEAR((two_step.elems() - apply_channel(rho, ab).elems()).norm(), 0.0, 1e-13);
}

TEST(channels, phase_unitary_commutes_loss_does_not) {
  const auto u = phase_unitary<double>(2e4, 1e-5, 8);
  EXPECT_NEAR(commutes_with_sensing_check(u), 0.0, 1e-15);
  const auto norms = commutes_with_sensing_check(damping_kraus<double>(0.1 * kT1, kT1, 8, 7));
  EXPECT_NEAR(norms[0], 0.0, 1e-15);
  for (std::size_t k = 1; k < norms.size(); ++k) EXPECT_GT(norms[k], 0.0) << k;
}

TEST(channels, phase_unitary_rotates_coherences) {
  const double omega = 3e4;
  const double t = 2e-5;
  const CVector<double> psi = (fock_ket<double>(1, 6).amps() + fock_ket<double>(4, 6).amps()) / std::sqrt(2.0);
  const auto out = apply_channel(DensityMatrix<>(StateVector<>(psi)), phase_unitary<double>(omega, t, 6));
  EXPECT_NEAR(std::arg(out(4, 1)), std::remainder(-3.0 * omega * t, 2 * std::numbers::pi), 1e-12);
}

TEST(channels, dephasing_damps_coherence) {
  const double rate = 2e3;
  const double t = 1e-4;
  const CVector<double> psi = (fock_ket<double>(0, 5).amps() + fock_ket<double>(2, 5).amps()) / std::sqrt(2.0);
  const DensityMatrix<> rho{StateVector<>(psi)};
  const auto plain = apply_channel(rho, damping_kraus<double>(t, kT1, 5, 4));
  const auto deph = apply_channel(rho, damping_kraus<double>(t, kT1, 5, 4, rate));
  EXPECT_NEAR(std::abs(deph(0, 2)) / std::abs(plain(0, 2)), std::exp(-rate * t * 4.0 / 2.0), 1e-12);
  EXPECT_NEAR(deph(2, 2).real(), plain(2, 2).real(), 1e-15);
}

TEST(channels, rejects_invalid_arguments) {
  EXPECT_THROW(damping_kraus<double>(-1e-6, kT1, 5, 4), std::invalid_argument);
  EXPECT_THROW(damping_kraus<double>(1e-6, 0.0, 5, 4), std::invalid_argument);
  EXPECT_THROW(damping_kraus<double>(1e-6, kT1, 5, 5), std::invalid_argument);
  EXPECT_THROW(damping_kraus<double>(1e-6, kT1, 5, 4, -1.0), std::invalid_argument);
  EXPECT_THROW(phase_unitary<double>(1.0, -1.0, 5), std::invalid_argument);
  EXPECT_THROW(apply_channel(DensityMatrix<>(fock_ket<double>(0, 4)), damping_kraus<double>(1e-6, kT1, 5, 4)),
               std::invalid_argument);
}
