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

#include "qecsense/protocol.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles/brute_force.hpp"
#include "support.hpp"

using namespace qecsense;

namespace {

ExperimentConfig make_config(int m, int n, double alpha, double tau_frac, int M) {
  ExperimentConfig c;
  c.code = CodeSpec<>::from_alpha(m, n, alpha);
  c.tau_int = tau_frac * c.T1;
  c.M = M;
  c.phi0_grid = uniform_phase_grid(8);
  return c;
}

oracle::SequenceSetup setup_of(const ExperimentConfig& c) {
  oracle::SequenceSetup s;
  s.m = c.code.m();
  s.n = c.code.n();
  s.alpha = c.code.alpha();
  s.T1 = c.T1;
  s.tau = c.tau_int;
  s.omega = c.omega;
  s.M = c.M;
  s.eps_qec = c.imperfections.eps_qec;
  s.eps_readout = c.imperfections.eps_readout;
  s.eps_reset = c.imperfections.eps_reset;
  s.phi1 = c.phi1;
  s.dim = static_cast<int>(c.dim());
  return s;
}

void expect_matches_oracle(const ExperimentConfig& c, double tol) {
  const auto data = run_qec_sequence(c).fringes;
  ASSERT_EQ(data.classes(), c.M + 1);
  for (std::size_t i = 0; i < c.phi0_grid.size(); ++i) {
    const auto ref = oracle::qec_classes(setup_of(c), c.phi0_grid[i]);
    for (int j = 0; j <= c.M; ++j) {
      EXPECT_NEAR(data.P(j, Outcome::g)[i], ref[j][0], tol) << "j=" << j << " i=" << i;
      EXPECT_NEAR(data.P(j, Outcome::e)[i], ref[j][1], tol) << "j=" << j << " i=" << i;
    }
  }
}

}  // namespace

TEST(protocol, strategy_names_round_trip) {
  for (Strategy s : {Strategy::TLS, Strategy::NoQEC, Strategy::QEC, Strategy::QEC_QJT}) {
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  }
  EXPECT_THROW(parse_strategy("QJT"), std::invalid_argument);
}

TEST(protocol, total_time_formulas) {
  ExperimentConfig c;
  c.tau_int = 10e-6;
  c.M = 3;
  const auto& o = c.overheads;
  EXPECT_DOUBLE_EQ(total_time(c, Strategy::QEC),
                   o.t_init + o.t_encode + 3 * (10e-6 + o.t_qec_pulse + o.t_readout + o.t_reset) + o.t_decode +
                       o.t_readout);
  EXPECT_DOUBLE_EQ(total_time(c, Strategy::NoQEC), o.t_init + o.t_encode + 30e-6 + o.t_decode + o.t_readout);
  EXPECT_EQ(total_time(c, Strategy::TLS), total_time(c, Strategy::NoQEC));
}

TEST(protocol, config_validation) {
  ExperimentConfig c;
  c.M = 20;
  EXPECT_THROW(c.validate(true), BranchLimitError);
  try {
    c.validate(true);
  } catch (const BranchLimitError& e) {
    EXPECT_NE(std::string(e.what()).find("2^20"), std::string::npos);
  }
  EXPECT_NO_THROW(c.validate(false));
  c.M = 1;
  c.tau_int = -1e-6;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.tau_int = 1e-6;
  c.imperfections.eps_readout = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(protocol, instrument_requires_correctable_code) {
  EXPECT_THROW(qec_instrument(CodeSpec<>::balanced(0, 3), 1e-5, 1e-4), std::invalid_argument);
  EXPECT_THROW(qec_instrument(CodeSpec<>::balanced(1, 2), 1e-5, 1e-4), std::invalid_argument);
  EXPECT_NO_THROW(qec_instrument(CodeSpec<>::balanced(1, 3), 1e-5, 1e-4));
}

TEST(protocol, instrument_preserves_trace) {
  std::mt19937_64 rng(2);
  const ImperfectionModel imp{0.03, 0.02, 0.01};
  const auto inst = qec_instrument(CodeSpec<>::balanced(1, 5), 0.2 * 143e-6, 143e-6, imp, 1e4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rho = testing_support::random_state(rng, 20, 8);
    const double total = inst.probability(rho, Outcome::g) + inst.probability(rho, Outcome::e);
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_GE(inst.apply(rho, Outcome::e).min_eigenvalue(), -1e-12);
  }
}

TEST(protocol, ideal_sequence_matches_brute_force) {
  for (int M = 1; M <= 4; ++M) {
    auto c = make_config(1, 3, 0.6, 0.1, M);
    c.omega = 2e4;
    expect_matches_oracle(c, 1e-12);
  }
  auto c = make_config(2, 5, 0.8, 0.15, 3);
  c.omega = -1e4;
  c.phi1 = 0.3;
  expect_matches_oracle(c, 1e-12);
}

TEST(protocol, imperfect_sequence_matches_brute_force) {
  auto c = make_config(1, 4, 0.7, 0.12, 3);
  c.omega = 5e3;
  c.imperfections = {0.05, 0.03, 0.04};
  expect_matches_oracle(c, 1e-12);
  c.code = CodeSpec<>::balanced(1, 3);
  c.M = 2;
  c.imperfections = {0.0, 0.0, 0.2};
  expect_matches_oracle(c, 1e-12);
}

TEST(protocol, free_evolution_matches_brute_force) {
  auto c = make_config(1, 5, 0.5, 0.3, 2);
  c.omega = 3e3;
  c.imperfections.eps_readout = 0.02;
  const auto data = run_no_qec(c);
  ASSERT_EQ(data.classes(), 1);
  for (std::size_t i = 0; i < c.phi0_grid.size(); ++i) {
    const auto ref = oracle::free_fringe(setup_of(c), c.phi0_grid[i], c.t_int());
    EXPECT_NEAR(data.P(0, Outcome::g)[i], ref[0], 1e-12);
    EXPECT_NEAR(data.P(0, Outcome::e)[i], ref[1], 1e-12);
  }
}

TEST(protocol, rounds_snapshots_equal_separate_runs) {
  auto c = make_config(1, 3, 0.65, 0.1, 5);
  c.imperfections = {0.01, 0.01, 0.01};
  const auto rounds = run_qec_rounds(c);
  ASSERT_EQ(rounds.size(), 5u);
  for (int M = 1; M <= 5; ++M) {
    auto cm = c;
    cm.M = M;
    const auto single = run_qec_sequence(cm).fringes;
    for (int j = 0; j <= M; ++j) {
      for (std::size_t i = 0; i < c.phi0_grid.size(); ++i) {
        EXPECT_EQ(rounds[M - 1].P(j, Outcome::g)[i], single.P(j, Outcome::g)[i]);
      }
    }
  }
}

TEST(protocol, probabilities_sum_to_one) {
  auto c = make_config(1, 7, 0.6, 0.2, 6);
  c.imperfections = {0.02, 0.02, 0.02};
  const auto data = run_qec_sequence(c).fringes;
  for (std::size_t i = 0; i < c.phi0_grid.size(); ++i) {
    double total = 0;
    for (int j = 0; j <= c.M; ++j) total += data.P(j, Outcome::g)[i] + data.P(j, Outcome::e)[i];
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(protocol, records_enumerate_all_strings) {
  auto c = make_config(1, 3, 0.6, 0.1, 4);
  c.imperfections = {0.01, 0.02, 0.03};
  const auto res = run_qec_sequence(c, SequenceOptions{true, std::nullopt});
  ASSERT_EQ(res.records.size(), 16u);
  std::vector<double> by_j(5, 0.0);
  double total = 0;
  for (const auto& r : res.records) {
    by_j[r.j] += r.prob;
    total += r.prob;
    EXPECT_EQ(static_cast<int>(r.outcomes.size()), 4);
    if (r.prob > 0) {
      EXPECT_NEAR(r.rho_cond.trace(), 1.0, 1e-12);
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  for (int j = 0; j <= 4; ++j) EXPECT_NEAR(by_j[j], res.class_states[j].trace(), 1e-12);
}

TEST(protocol, exact_mode_branch_guard) {
  auto c = make_config(1, 3, 0.6, 0.01, 17);
  EXPECT_THROW(run_qec_sequence(c), BranchLimitError);
  EXPECT_NO_THROW(run_qec_sequence(c, SequenceOptions{false, SamplingOptions{100, 1}}));
}

TEST(protocol, truncated_loss_family_is_rejected) {
  auto c = make_config(1, 7, 0.6, 0.1, 1);
  c.k_max = 4;
  EXPECT_THROW(run_qec_sequence(c), TruncationError);
  EXPECT_THROW(run_no_qec(c), TruncationError);
}

TEST(protocol, results_independent_of_truncation) {
  auto c = make_config(1, 5, 0.6, 0.1, 3);
  c.omega = 1e4;
  auto small = c;
  small.code = c.code.with_dim(8);
  const auto a = run_qec_sequence(c).fringes;
  const auto b = run_qec_sequence(small).fringes;
  for (int j = 0; j <= 3; ++j) {
    for (std::size_t i = 0; i < c.phi0_grid.size(); ++i) {
      EXPECT_NEAR(a.P(j, Outcome::e)[i], b.P(j, Outcome::e)[i], 1e-15);
    }
  }
}

TEST(protocol, class_states_match_conditional_states) {
  auto c = make_config(1, 3, 0.6, 0.1, 2);
  const auto res = run_qec_sequence(c, SequenceOptions{true, std::nullopt});
  CMatrix<double> sum0 = CMatrix<double>::Zero(20, 20);
  for (const auto& r : res.records) {
    if (r.j == 0) sum0 += r.prob * r.rho_cond.elems();
  }
  EXPECT_NEAR((sum0 - res.class_states[0].elems()).norm(), 0.0, 1e-13);
}

TEST(protocol, phase_is_preserved_through_correction) {
  const double T1 = 143e-6;
  const double omega = 2 * std::numbers::pi * 3e3;
  for (int n : {3, 5, 7}) {
    auto c = make_config(1, n, std::sqrt(0.5), 0.1, 1);
    c.omega = omega;
    const auto res = run_qec_sequence(c, SequenceOptions{true, std::nullopt});
    for (const auto& r : res.records) {
      const double phase = std::arg(r.rho_cond(n, 1));
      EXPECT_NEAR(std::remainder(phase - (-(n - 1) * omega * 0.1 * T1), 2 * std::numbers::pi), 0.0, 1e-12);
    }
  }
}

TEST(protocol, sampled_mode_is_seeded_and_consistent) {
  auto c = make_config(1, 3, 0.6, 0.1, 3);
  c.imperfections = {0.02, 0.03, 0.04};
  const long shots = 20000;
  const SequenceOptions opts{false, SamplingOptions{shots, 42}};
  const auto a = run_qec_sequence(c, opts).fringes;
  const auto b = run_qec_sequence(c, opts).fringes;
  const auto other = run_qec_sequence(c, SequenceOptions{false, SamplingOptions{shots, 43}}).fringes;
  const auto exact = run_qec_sequence(c).fringes;
  ASSERT_TRUE(a.shots.has_value());
  bool differs = false;
  for (int j = 0; j <= 3; ++j) {
    for (int l = 0; l < 2; ++l) {
      const auto o = static_cast<Outcome>(l);
      for (std::size_t i = 0; i < c.phi0_grid.size(); ++i) {
        EXPECT_EQ(a.P(j, o)[i], b.P(j, o)[i]);
        differs |= a.P(j, o)[i] != other.P(j, o)[i];
        const double p = exact.P(j, o)[i];
        const double sd = std::sqrt(std::max(p * (1 - p), 1e-6) / shots);
        EXPECT_NEAR(a.P(j, o)[i], p, 5 * sd + 1e-12) << j << l << i;
      }
    }
  }
  EXPECT_TRUE(differs);
}

TEST(protocol, sampled_free_evolution_is_consistent) {
  auto c = make_config(1, 3, 0.6, 0.4, 1);
  const auto exact = run_no_qec(c);
  const auto s = run_no_qec(c, SamplingOptions{50000, 9});
  for (std::size_t i = 0; i < c.phi0_grid.size(); ++i) {
    const double p = exact.P(0, Outcome::g)[i];
    EXPECT_NEAR(s.P(0, Outcome::g)[i], p, 5 * std::sqrt(p * (1 - p) / 50000));
  }
}

TEST(protocol, tls_strategy_uses_lowest_levels) {
  auto c = make_config(1, 5, 0.6, 0.1, 1);
  const auto tls = tls_config(c);
  EXPECT_EQ(tls.code.m(), 0);
  EXPECT_EQ(tls.code.n(), 1);
  const auto a = run_strategy(c, Strategy::TLS);
  const auto b = run_no_qec(tls);
  EXPECT_EQ(a.P(0, Outcome::g), b.P(0, Outcome::g));
}

TEST(protocol, radiometry_curves_and_max_slope_phase) {
  auto c = make_config(1, 3, std::sqrt(0.5), 0.1, 1);
  const double chi = 2 * std::numbers::pi * 15300;
  const std::vector<double> grid{0.0, 1e-3, 2e-3, 3e-3, 4e-3};
  const auto curves = run_radiometry(c, grid, chi, Strategy::QEC_QJT);
  ASSERT_EQ(curves.probability.size(), 2u);
  const auto merged = curves.merged(Outcome::g);
  const double slope = (merged[3] - merged[1]) / 2e-3;
  const auto data = run_qec_sequence(c).fringes;
  // At the max-slope phase P_g(p=0) sits at the fringe midpoint.
  EXPECT_NEAR(merged[0], 0.5, 1e-9);
  EXPECT_LT(std::abs(slope), 2 * chi * c.tau_int);
  EXPECT_GT(std::abs(slope), 0.5 * chi * c.tau_int);
  EXPECT_THROW(run_radiometry(c, grid, -1.0, Strategy::QEC), std::invalid_argument);
}
