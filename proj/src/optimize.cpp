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

#include "qecsense/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qecsense/parallel.hpp"

namespace qecsense {

namespace {

bool uses_qec(Strategy s) { return s == Strategy::QEC || s == Strategy::QEC_QJT; }

ExperimentConfig configure(const OptimizationProblem& problem, double alpha) {
  ExperimentConfig cfg = problem.base;
  const auto& c = problem.base.code;
  if (problem.strategy == Strategy::TLS) {
    cfg.code = CodeSpec<>::from_alpha(0, 1, alpha, c.phi0(), c.dim());
  } else {
    cfg.code = CodeSpec<>::from_alpha(c.m(), c.n(), alpha, c.phi0(), c.dim());
  }
  return cfg;
}

double rate(const FringeDataset& data, const ExperimentConfig& cfg, Strategy strategy) {
  const double F = strategy_fi(data, strategy, cfg.code.gap(), cfg.t_int());
  return F / total_time(cfg, strategy);
}

}  // namespace

void OptimizationProblem::validate() const {
  base.validate(false);
  detail::require(tau_min > 0.0 && tau_max > tau_min, "optimize: need 0 < tau_min < tau_max");
  detail::require(M_max >= 1 && M_max <= kMaxExactRounds, "optimize: M_max must lie in 1..16");
  detail::require(alpha_points >= 1 && tau_points >= 2, "optimize: grid too small");
  detail::require(max_iterations >= 0, "optimize: max_iterations must be >= 0");
  detail::require(tolerance > 0.0, "optimize: tolerance must be > 0");
}

int OptimizationProblem::rounds() const { return uses_qec(strategy) ? M_max : 1; }

double evaluate_q(const OptimizationProblem& problem, double alpha, double tau_int, int M) {
  ExperimentConfig cfg = configure(problem, alpha);
  cfg.tau_int = tau_int;
  cfg.M = uses_qec(problem.strategy) ? M : 1;
  const Strategy run_as = problem.strategy == Strategy::TLS ? Strategy::NoQEC : problem.strategy;
  return rate(run_strategy(cfg, run_as), cfg, problem.strategy);
}

std::vector<double> evaluate_q_rounds(const OptimizationProblem& problem, double alpha, double tau_int) {
  if (!uses_qec(problem.strategy)) return {evaluate_q(problem, alpha, tau_int, 1)};
  ExperimentConfig cfg = configure(problem, alpha);
  cfg.tau_int = tau_int;
  cfg.M = problem.M_max;
  const auto rounds = run_qec_rounds(cfg);
  std::vector<double> q;
  q.reserve(rounds.size());
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    cfg.M = static_cast<int>(r) + 1;
    q.push_back(rate(rounds[r], cfg, problem.strategy));
  }
  return q;
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
  detail::require(lo > 0.0 && hi > lo && n >= 2, "geometric_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(static_cast<std::size_t>(n));
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  g.back() = hi;
  return g;
}

OptimizationResult optimize_q(const OptimizationProblem& problem) {
  problem.validate();
  OptimizationResult result;

  std::vector<double> alphas;
  for (int i = 1; i <= problem.alpha_points; ++i) alphas.push_back(double(i) / (problem.alpha_points + 1));
  const auto taus = geometric_grid(problem.tau_min, problem.tau_max, problem.tau_points);

  const std::size_t cells = alphas.size() * taus.size();
  const auto grid = parallel_map(cells, problem.threads, [&](std::size_t k) {
    return evaluate_q_rounds(problem, alphas[k / taus.size()], taus[k % taus.size()]);
  });

  OptimizationPoint best;
  best.Q = -1.0;
  for (std::size_t k = 0; k < cells; ++k) {
    for (std::size_t r = 0; r < grid[k].size(); ++r) {
      OptimizationPoint pt{alphas[k / taus.size()], taus[k % taus.size()], static_cast<int>(r) + 1,
                           grid[k][r], "grid"};
      result.trace.push_back(pt);
      if (pt.Q > best.Q) best = pt;
    }
  }
  result.best_grid_Q = best.Q;

  // Nelder-Mead on x = (alpha, ln tau), minimizing -Q, with projection onto
  // the box.
  const double a_lo = 1e-3;
  const double a_hi = 1.0 - 1e-3;
  const double l_lo = std::log(problem.tau_min);
  const double l_hi = std::log(problem.tau_max);
  using Vec = std::array<double, 2>;
  auto project = [&](Vec x) {
    x[0] = std::clamp(x[0], a_lo, a_hi);
    x[1] = std::clamp(x[1], l_lo, l_hi);
    return x;
  };
  auto objective = [&](const Vec& x) {
    OptimizationPoint pt{x[0], std::exp(x[1]), best.M, 0.0, "simplex"};
    pt.Q = evaluate_q(problem, pt.alpha, pt.tau_int, pt.M);
    result.trace.push_back(pt);
    return -pt.Q;
  };

  const double da = 1.0 / (problem.alpha_points + 1);
  const double dl = (l_hi - l_lo) / (problem.tau_points - 1);
  const Vec x0{best.alpha, std::log(best.tau_int)};
  std::array<Vec, 3> simplex{x0, project({x0[0] + da, x0[1]}), project({x0[0], x0[1] + dl})};
  if (simplex[1] == x0) simplex[1] = project({x0[0] - da, x0[1]});
  if (simplex[2] == x0) simplex[2] = project({x0[0], x0[1] - dl});
  std::array<double, 3> f{-best.Q, objective(simplex[1]), objective(simplex[2])};

  int it = 0;
  for (; it < problem.max_iterations; ++it) {
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return f[a] < f[b]; });
    std::array<Vec, 3> s{simplex[order[0]], simplex[order[1]], simplex[order[2]]};
    std::array<double, 3> fs{f[order[0]], f[order[1]], f[order[2]]};
    simplex = s;
    f = fs;

    double size = 0.0;
    for (int v = 1; v < 3; ++v) {
      size = std::max({size, std::abs(simplex[v][0] - simplex[0][0]), std::abs(simplex[v][1] - simplex[0][1])});
    }
    if (std::abs(f[2] - f[0]) <= problem.tolerance * std::abs(f[0]) || size < 1e-12) {
      result.converged = true;
      break;
    }

    const Vec c{(simplex[0][0] + simplex[1][0]) / 2.0, (simplex[0][1] + simplex[1][1]) / 2.0};
    auto along = [&](double t) {
      return project({c[0] + t * (simplex[2][0] - c[0]), c[1] + t * (simplex[2][1] - c[1])});
    };
    const Vec xr = along(-1.0);
    const double fr = objective(xr);
    if (fr < f[0]) {
      const Vec xe = along(-2.0);
      const double fe = objective(xe);
      if (fe < fr) {
        simplex[2] = xe;
        f[2] = fe;
      } else {
        simplex[2] = xr;
        f[2] = fr;
      }
      continue;
    }
    if (fr < f[1]) {
      simplex[2] = xr;
      f[2] = fr;
      continue;
    }
    const bool outside = fr < f[2];
    const Vec xc = along(outside ? -0.5 : 0.5);
    const double fc = objective(xc);
    if (fc < (outside ? fr : f[2])) {
      simplex[2] = xc;
      f[2] = fc;
      continue;
    }
    for (int v = 1; v < 3; ++v) {
      simplex[v] = project({(simplex[0][0] + simplex[v][0]) / 2.0, (simplex[0][1] + simplex[v][1]) / 2.0});
      f[v] = objective(simplex[v]);
    }
  }
  result.iterations = it;

  const auto winner = static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
  if (-f[winner] > best.Q) {
    best = OptimizationPoint{simplex[winner][0], std::exp(simplex[winner][1]), best.M, -f[winner], "simplex"};
  }
  result.best = best;
  return result;
}

SweepTable sweep_q(const ExperimentConfig& config, std::span<const double> t_int,
                   std::span<const Strategy> strategies, int M_max, int threads) {
  config.validate(false);
  detail::require(M_max >= 1 && M_max <= kMaxExactRounds, "sweep_q: M_max must lie in 1..16");
  detail::require(config.tau_int > 0.0, "sweep_q: tau_int must be > 0");
  for (double t : t_int) detail::require(t > 0.0, "sweep_q: t_int values must be > 0");

  SweepTable table;
  table.t_int.assign(t_int.begin(), t_int.end());
  table.strategies.assign(strategies.begin(), strategies.end());
  for (double t : t_int) {
    table.M.push_back(static_cast<int>(std::clamp<long>(std::lround(t / config.tau_int), 1L, M_max)));
  }

  const std::size_t nt = t_int.size();
  struct Cell {
    double F = 0, t_tot = 0;
  };
  const auto cells = parallel_map(strategies.size() * nt, threads, [&](std::size_t k) {
    const Strategy s = strategies[k / nt];
    const std::size_t i = k % nt;
    ExperimentConfig cfg = s == Strategy::TLS ? tls_config(config) : config;
    if (uses_qec(s)) {
      cfg.M = table.M[i];
      cfg.tau_int = t_int[i] / cfg.M;
    } else {
      cfg.M = 1;
      cfg.tau_int = t_int[i];
    }
    const FringeDataset data = run_strategy(cfg, s);
    return Cell{strategy_fi(data, s, cfg.code.gap(), cfg.t_int()), total_time(cfg, s)};
  });

  for (std::size_t s = 0; s < strategies.size(); ++s) {
    std::vector<double> q, F, tt;
    for (std::size_t i = 0; i < nt; ++i) {
      const Cell& c = cells[s * nt + i];
      F.push_back(c.F);
      tt.push_back(c.t_tot);
      q.push_back(c.F / c.t_tot);
    }
    table.Q.push_back(std::move(q));
    table.F.push_back(std::move(F));
    table.t_tot.push_back(std::move(tt));
  }
  return table;
}

}  // namespace qecsense
