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

#include "qecsense/runner.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qecsense/parallel.hpp"

namespace qecsense {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

bool uses_qec(Strategy s) { return s == Strategy::QEC || s == Strategy::QEC_QJT; }

class Summary {
 public:
  void add(const std::string& key, const std::string& value) { lines_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, format_number(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, long value) { add(key, std::to_string(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }
  void add(const std::string& key, std::string_view value) { add(key, std::string(value)); }

  std::string str() const {
    std::string out;
    for (const auto& [k, v] : lines_) out += k + " = " + v + "\n";
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

class Table {
 public:
  explicit Table(std::vector<std::string> header) {
    for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
    text_ += "\n";
  }

  Table& cell(const std::string& v) {
    text_ += (row_open_ ? "," : "") + v;
    row_open_ = true;
    return *this;
  }
  Table& cell(double v) { return cell(format_number(v)); }
  Table& cell(int v) { return cell(std::to_string(v)); }
  Table& cell(std::size_t v) { return cell(std::to_string(v)); }
  Table& cell(std::string_view v) { return cell(std::string(v)); }
  Table& cell(const char* v) { return cell(std::string(v)); }
  void end() {
    text_ += "\n";
    row_open_ = false;
  }

  const std::string& str() const { return text_; }

 private:
  std::string text_;
  bool row_open_ = false;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << content;
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void describe_config(Summary& s, const ExperimentConfig& c) {
  s.add("config.code.m", c.code.m());
  s.add("config.code.n", c.code.n());
  s.add("config.code.alpha", c.code.alpha());
  s.add("config.code.beta", c.code.beta());
  s.add("config.code.phi0[rad]", c.code.phi0());
  s.add("config.dim", static_cast<long>(c.dim()));
  s.add("config.T1[s]", c.T1);
  s.add("config.omega[rad/s]", c.omega);
  s.add("config.tau_int[s]", c.tau_int);
  s.add("config.M", c.M);
  s.add("config.k_max", c.resolved_k_max());
  s.add("config.dephasing_rate[1/s]", c.dephasing_rate);
  s.add("config.phi1[rad]", c.phi1);
  s.add("config.phi0_points", static_cast<long>(c.phi0_grid.size()));
  s.add("config.overheads.t_init[s]", c.overheads.t_init);
  s.add("config.overheads.t_encode[s]", c.overheads.t_encode);
  s.add("config.overheads.t_qec_pulse[s]", c.overheads.t_qec_pulse);
  s.add("config.overheads.t_readout[s]", c.overheads.t_readout);
  s.add("config.overheads.t_reset[s]", c.overheads.t_reset);
  s.add("config.overheads.t_decode[s]", c.overheads.t_decode);
  s.add("config.imperfections.eps_qec", c.imperfections.eps_qec);
  s.add("config.imperfections.eps_readout", c.imperfections.eps_readout);
  s.add("config.imperfections.eps_reset", c.imperfections.eps_reset);
}

struct Resolved {
  long shots = 0;
  std::uint64_t seed = 0;
  std::optional<SamplingOptions> sampling(std::uint64_t salt) const {
    if (shots == 0) return std::nullopt;
    return SamplingOptions{shots, seed ^ (0xD1B54A32D192ED03ULL * (salt + 1))};
  }
};

Resolved resolve(const RunManifest& m, const RunOptions& o) {
  Resolved r;
  r.shots = o.sampled_shots.value_or(m.sampled_shots);
  r.seed = o.seed.value_or(m.seed.value_or(0));
  detail::require(r.shots >= 0, "sampled shots must be >= 0");
  if (r.shots > 0 && m.kind != ExperimentKind::VirtualPhase) {
    throw std::invalid_argument(std::string(to_string(m.kind)) +
                                ": sampled mode is only available for virtual_phase experiments");
  }
  return r;
}

template <typename Fn>
auto at_point(const std::string& where, Fn fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw std::runtime_error("simulation failed at " + where + ": " + e.what());
  }
}

std::string strategy_name(Strategy s) { return std::string(to_string(s)); }

// ---------------------------------------------------------------------------

struct PhasePoint {
  Strategy strategy;
  int M;
  ExperimentConfig cfg;
  FringeDataset data;
  FringeFit fit;
  double F = 0;
  double t_tot = 0;
};

ExperimentConfig strategy_config(const ExperimentConfig& base, Strategy s, int M) {
  ExperimentConfig cfg = s == Strategy::TLS ? tls_config(base) : base;
  cfg.M = M;
  return cfg;
}

void run_virtual_phase(const RunManifest& man, const VirtualPhaseSpec& spec, const Resolved& res,
                       int threads, Table& table, Summary& sum) {
  struct Key {
    Strategy s;
    int M;
  };
  std::vector<Key> keys;
  for (Strategy s : spec.strategies) {
    for (int M : spec.M_values) keys.push_back({s, M});
  }
  // TLS references at each M, exact unless TLS itself is requested.
  for (int M : spec.M_values) keys.push_back({Strategy::TLS, M});

  const std::size_t requested = spec.strategies.size() * spec.M_values.size();
  auto points = parallel_map(keys.size(), threads, [&](std::size_t k) {
    const Key key = keys[k];
    const std::string where = "strategy=" + strategy_name(key.s) + " M=" + std::to_string(key.M);
    return at_point(where, [&] {
      PhasePoint p{key.s, key.M, strategy_config(man.config, key.s, key.M), {}, {}, 0, 0};
      p.data = run_strategy(p.cfg, key.s, k < requested ? res.sampling(k) : std::nullopt);
      p.fit = fit_merged(p.data);
      p.F = strategy_fi(p.data, key.s, p.cfg.code.gap(), p.cfg.t_int());
      p.t_tot = total_time(p.cfg, key.s);
      return p;
    });
  });

  for (std::size_t k = 0; k < requested; ++k) {
    const PhasePoint& p = points[k];
    const std::string name = strategy_name(p.strategy);
    for (int j = 0; j < p.data.classes(); ++j) {
      for (int l = 0; l < 2; ++l) {
        const auto& P = p.data.P(j, static_cast<Outcome>(l));
        for (std::size_t i = 0; i < P.size(); ++i) {
          table.cell(name).cell(p.M).cell(p.cfg.t_int()).cell(p.data.phi0[i]).cell(j);
          table.cell(to_string(static_cast<Outcome>(l))).cell(P[i]);
          table.end();
        }
      }
    }
  }

  for (std::size_t k = 0; k < requested; ++k) {
    const PhasePoint& p = points[k];
    const std::size_t m_index = k % spec.M_values.size();
    const PhasePoint* ref = &points[requested + m_index];
    for (std::size_t q = 0; q < requested; ++q) {
      if (points[q].strategy == Strategy::TLS && points[q].M == p.M) ref = &points[q];
    }
    const SensitivityReport r = sensitivity_report(p.F, p.t_tot, spec.chi, p.strategy);
    const SensitivityReport r_ref = sensitivity_report(ref->F, ref->t_tot, spec.chi, Strategy::TLS);
    const std::string key = "result." + strategy_name(p.strategy) + ".M" + std::to_string(p.M) + ".";
    sum.add(key + "m", p.cfg.code.m());
    sum.add(key + "n", p.cfg.code.n());
    sum.add(key + "t_int[s]", p.cfg.t_int());
    sum.add(key + "t_tot[s]", p.t_tot);
    sum.add(key + "classes", p.data.classes());
    sum.add(key + "fit.A", p.fit.A);
    sum.add(key + "fit.A_err", p.fit.sigma_A);
    sum.add(key + "fit.B", p.fit.B);
    sum.add(key + "fit.B_err", p.fit.sigma_B);
    sum.add(key + "fit.phi[rad]", p.fit.phi);
    sum.add(key + "fit.phi_err[rad]", p.fit.sigma_phi);
    sum.add(key + "fit.residual_rms", p.fit.residual_rms);
    sum.add(key + "F[s^2]", r.F);
    sum.add(key + "Q[s]", r.Q);
    sum.add(key + "sigma_omega[rad/s/sqrt(Hz)]", r.sigma_omega);
    if (r.sigma_p) sum.add(key + "sigma_p[1/sqrt(Hz)]", *r.sigma_p);
    sum.add(key + "enhancement_dB", enhancement_db(r_ref.sigma_omega, r.sigma_omega));
  }
}

void run_sweep(const RunManifest& man, const QecSweepSpec& spec, int threads, Table& table, Summary& sum) {
  const SweepTable t = at_point("qec_sweep", [&] {
    return sweep_q(man.config, spec.t_int, spec.strategies, spec.M_max, threads);
  });
  std::optional<double> tls_peak;
  for (std::size_t s = 0; s < t.strategies.size(); ++s) {
    const bool qec = uses_qec(t.strategies[s]);
    for (std::size_t i = 0; i < t.t_int.size(); ++i) {
      const int M = qec ? t.M[i] : 1;
      const double q = t.Q[s][i];
      table.cell(to_string(t.strategies[s])).cell(t.t_int[i]).cell(M).cell(t.t_int[i] / M);
      table.cell(t.t_tot[s][i]).cell(t.F[s][i]).cell(q).cell(q > 0 ? 1.0 / std::sqrt(q) : INFINITY);
      table.end();
    }
    if (t.strategies[s] == Strategy::TLS) {
      tls_peak = *std::max_element(t.Q[s].begin(), t.Q[s].end());
    }
  }
  for (std::size_t s = 0; s < t.strategies.size(); ++s) {
    const auto& q = t.Q[s];
    const auto peak = static_cast<std::size_t>(std::max_element(q.begin(), q.end()) - q.begin());
    const std::string key = "result." + strategy_name(t.strategies[s]) + ".";
    sum.add(key + "peak.Q[s]", q[peak]);
    sum.add(key + "peak.t_int[s]", t.t_int[peak]);
    sum.add(key + "peak.t_int[T1]", t.t_int[peak] / man.config.T1);
    sum.add(key + "peak.sigma_omega[rad/s/sqrt(Hz)]", 1.0 / std::sqrt(q[peak]));
    sum.add(key + "rises_then_falls", peak > 0 && peak + 1 < q.size());
    if (tls_peak && q[peak] > 0) {
      sum.add(key + "peak.enhancement_dB", enhancement_db(1.0 / std::sqrt(*tls_peak), 1.0 / std::sqrt(q[peak])));
    }
  }
}

void run_radiometry_kind(const RunManifest& man, const RadiometrySpec& spec, int threads, Table& table,
                         Summary& sum) {
  const auto grid = radiometry_stencil(spec.p_step);
  struct Out {
    ExperimentConfig cfg;
    RadiometryCurves curves;
    RadiometrySensitivity sens;
    double t_tot = 0;
  };
  const auto outs = parallel_map(spec.runs.size(), threads, [&](std::size_t i) {
    const RadiometryRun& run = spec.runs[i];
    const std::string where = "runs[" + std::to_string(i) + "] (" + strategy_name(run.strategy) + ", m=" +
                              std::to_string(run.m) + ", n=" + std::to_string(run.n) + ")";
    return at_point(where, [&] {
      Out o;
      o.cfg = man.config;
      o.cfg.code = run.alpha ? CodeSpec<>::from_alpha(run.m, run.n, *run.alpha, 0.0, man.config.dim())
                             : CodeSpec<>::balanced(run.m, run.n, 0.0, man.config.dim());
      if (run.imperfections) o.cfg.imperfections = *run.imperfections;
      if (run.tau_int) o.cfg.tau_int = *run.tau_int;
      if (run.M) o.cfg.M = *run.M;
      // The code is set explicitly, so TLS runs as free evolution of that code.
      const Strategy engine = run.strategy == Strategy::TLS ? Strategy::NoQEC : run.strategy;
      o.curves = run_radiometry(o.cfg, grid, spec.chi, engine);
      o.curves.strategy = run.strategy;
      o.t_tot = total_time(o.cfg, run.strategy);
      o.sens = radiometry_sensitivity(
          o.curves, o.t_tot, run.strategy == Strategy::QEC_QJT ? RadiometryMode::QJT : RadiometryMode::Merged);
      return o;
    });
  });

  std::optional<double> tls_sigma;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    if (spec.runs[i].strategy == Strategy::TLS && !tls_sigma) tls_sigma = outs[i].sens.sigma_p;
  }

  for (std::size_t r = 0; r < outs.size(); ++r) {
    const Out& o = outs[r];
    const std::string name = strategy_name(spec.runs[r].strategy);
    for (std::size_t j = 0; j < o.curves.probability.size(); ++j) {
      const auto& g = o.curves.probability[j][0];
      const double slope = ((4.0 * (g[3] - g[1]) / 2.0) - (g[4] - g[0]) / 4.0) / (3.0 * spec.p_step);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        table.cell(name).cell(o.cfg.code.m()).cell(o.cfg.code.n()).cell(grid[i]).cell(j);
        table.cell(g[i]).cell(o.curves.probability[j][1][i]).cell(slope).cell(o.sens.sigma_p);
        table.end();
      }
    }
    const std::string key = "result.run" + std::to_string(r) + ".";
    sum.add(key + "strategy", name);
    sum.add(key + "m", o.cfg.code.m());
    sum.add(key + "n", o.cfg.code.n());
    sum.add(key + "alpha", o.cfg.code.alpha());
    sum.add(key + "tau_int[s]", o.cfg.tau_int);
    sum.add(key + "M", o.cfg.M);
    sum.add(key + "t_int[s]", o.cfg.t_int());
    sum.add(key + "imperfections.eps_qec", o.cfg.imperfections.eps_qec);
    sum.add(key + "imperfections.eps_readout", o.cfg.imperfections.eps_readout);
    sum.add(key + "imperfections.eps_reset", o.cfg.imperfections.eps_reset);
    sum.add(key + "phi0[rad]", o.curves.phi0);
    sum.add(key + "p_center", o.sens.p_center);
    sum.add(key + "P_g", o.sens.P_g);
    sum.add(key + "slope", o.sens.slope);
    sum.add(key + "t_tot[s]", o.t_tot);
    sum.add(key + "sigma_p[1/sqrt(Hz)]", o.sens.sigma_p);
    if (tls_sigma) sum.add(key + "enhancement_dB", enhancement_db(*tls_sigma, o.sens.sigma_p));
  }
  sum.add("result.chi[rad/s]", spec.chi);
}

void run_optimize(const RunManifest& man, const OptimizeSpec& spec, int threads, Table& table, Summary& sum) {
  OptimizationProblem p;
  p.base = man.config;
  p.strategy = spec.strategy;
  p.tau_min = spec.tau_min;
  p.tau_max = spec.tau_max;
  p.M_max = spec.M_max;
  p.alpha_points = spec.alpha_points;
  p.tau_points = spec.tau_points;
  p.max_iterations = spec.max_iterations;
  p.tolerance = spec.tolerance;
  p.threads = threads;
  const OptimizationResult r = at_point("optimize", [&] { return optimize_q(p); });
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const auto& t = r.trace[i];
    table.cell(i).cell(std::string(t.phase)).cell(t.alpha).cell(t.tau_int).cell(t.M).cell(t.Q);
    table.end();
  }
  sum.add("result.strategy", strategy_name(spec.strategy));
  sum.add("result.best.alpha", r.best.alpha);
  sum.add("result.best.beta", std::sqrt(1.0 - r.best.alpha * r.best.alpha));
  sum.add("result.best.tau_int[s]", r.best.tau_int);
  sum.add("result.best.tau_int[T1]", r.best.tau_int / man.config.T1);
  sum.add("result.best.M", r.best.M);
  sum.add("result.best.Q[s]", r.best.Q);
  sum.add("result.best.sigma_omega[rad/s/sqrt(Hz)]", r.best.Q > 0 ? 1.0 / std::sqrt(r.best.Q) : INFINITY);
  sum.add("result.best_grid.Q[s]", r.best_grid_Q);
  sum.add("result.converged", r.converged);
  sum.add("result.iterations", r.iterations);
  sum.add("result.evaluations", static_cast<long>(r.trace.size()));
}

void run_wigner(const RunManifest& man, const WignerSpec& spec, Table& table, Summary& sum) {
  const CodeSpec<>& code = man.config.code;
  StateVector<> psi = encode(code);
  if (spec.stage != WignerStage::Encoded) psi = (annihilation<double>(code.dim()) * psi).normalized();
  if (spec.stage == WignerStage::Recovered) psi = transpose_recovery(code, 1).matrix * psi;
  const DensityMatrix<> rho(psi);

  std::vector<Complex<double>> grid;
  const double dre = (spec.re_max - spec.re_min) / (spec.re_points - 1);
  const double dim_ = (spec.im_max - spec.im_min) / (spec.im_points - 1);
  for (int a = 0; a < spec.re_points; ++a) {
    for (int b = 0; b < spec.im_points; ++b) {
      grid.emplace_back(spec.re_min + a * dre, spec.im_min + b * dim_);
    }
  }
  const auto w = at_point("wigner", [&] { return wigner(rho, std::span<const Complex<double>>(grid), spec.working_dim); });
  double integral = 0.0;
  double lo = INFINITY;
  double hi = -INFINITY;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    table.cell(grid[i].real()).cell(grid[i].imag()).cell(w.values[i]);
    table.end();
    integral += w.values[i] * dre * dim_;
    lo = std::min(lo, w.values[i]);
    hi = std::max(hi, w.values[i]);
  }
  const char* stage = spec.stage == WignerStage::Encoded ? "encoded"
                      : spec.stage == WignerStage::Error ? "error"
                                                         : "recovered";
  sum.add("result.stage", stage);
  sum.add("result.working_dim", static_cast<long>(w.working_dim));
  sum.add("result.truncation_warning", w.truncation_warning);
  sum.add("result.integral", integral);
  sum.add("result.W_min", lo);
  sum.add("result.W_max", hi);
  sum.add("result.parity", expectation(rho, parity<double>(code.dim())).real());
}

std::vector<std::string> header_for(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::VirtualPhase:
      return {"strategy", "M", "t_int[s]", "phi0[rad]", "j", "outcome", "probability"};
    case ExperimentKind::QecSweep:
      return {"strategy", "t_int[s]", "M", "tau_eff[s]", "t_tot[s]", "F[s^2]", "Q[s]",
              "sigma_omega[rad/s/sqrt(Hz)]"};
    case ExperimentKind::Radiometry:
      return {"strategy", "m", "n", "p", "j", "P_g", "P_e", "slope_g[1/p]", "sigma_p[1/sqrt(Hz)]"};
    case ExperimentKind::Optimize:
      return {"index", "phase", "alpha", "tau_int[s]", "M", "Q[s]"};
    case ExperimentKind::Wigner:
      return {"re_beta", "im_beta", "W"};
  }
  return {};
}

}  // namespace

RunArtifacts run_manifest(const RunManifest& man, const RunOptions& options) {
  const Resolved res = resolve(man, options);
  detail::require(options.threads >= 1, "threads must be >= 1");

  Summary sum;
  sum.add("run.name", man.name);
  sum.add("run.kind", to_string(man.kind));
  sum.add("run.schema_version", man.schema_version);
  sum.add("run.mode", res.shots > 0 ? "sampled" : "exact");
  sum.add("run.shots", res.shots);
  sum.add("run.seed", std::to_string(res.seed));
  describe_config(sum, man.config);

  Table table(header_for(man.kind));
  std::visit(
      [&](const auto& spec) {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, VirtualPhaseSpec>) {
          run_virtual_phase(man, spec, res, options.threads, table, sum);
        } else if constexpr (std::is_same_v<T, QecSweepSpec>) {
          run_sweep(man, spec, options.threads, table, sum);
        } else if constexpr (std::is_same_v<T, RadiometrySpec>) {
          run_radiometry_kind(man, spec, options.threads, table, sum);
        } else if constexpr (std::is_same_v<T, OptimizeSpec>) {
          run_optimize(man, spec, options.threads, table, sum);
        } else {
          run_wigner(man, spec, table, sum);
        }
      },
      man.spec);

  std::filesystem::create_directories(options.output_dir);
  RunArtifacts out{options.output_dir / man.results_file, options.output_dir / man.summary_file};
  write_file(out.results, table.str());
  write_file(out.summary, sum.str());
  return out;
}

std::string validate_report(const RunManifest& man, const RunOptions& options) {
  const Resolved res = resolve(man, options);
  Summary sum;
  sum.add("status", "ok");
  sum.add("run.name", man.name);
  sum.add("run.kind", to_string(man.kind));
  sum.add("run.mode", res.shots > 0 ? "sampled" : "exact");
  sum.add("run.shots", res.shots);
  sum.add("run.seed", std::to_string(res.seed));
  sum.add("outputs.results", (options.output_dir / man.results_file).string());
  sum.add("outputs.summary", (options.output_dir / man.summary_file).string());
  describe_config(sum, man.config);

  auto times = [&](const ExperimentConfig& cfg, const std::string& prefix) {
    for (Strategy s : {Strategy::TLS, Strategy::NoQEC, Strategy::QEC, Strategy::QEC_QJT}) {
      sum.add(prefix + "t_tot." + strategy_name(s) + "[s]", total_time(cfg, s));
    }
  };

  if (const auto* vp = std::get_if<VirtualPhaseSpec>(&man.spec)) {
    for (int M : vp->M_values) {
      ExperimentConfig cfg = man.config;
      cfg.M = M;
      cfg.validate(res.shots == 0);
      const std::string prefix = "resolved.M" + std::to_string(M) + ".";
      times(cfg, prefix);
      sum.add(prefix + "branches", std::to_string(std::uint64_t{1} << M));
    }
  } else if (const auto* sw = std::get_if<QecSweepSpec>(&man.spec)) {
    sum.add("resolved.points", static_cast<long>(sw->t_int.size()));
    sum.add("resolved.M_max", sw->M_max);
    sum.add("resolved.branches", std::to_string(std::uint64_t{1} << sw->M_max));
  } else if (const auto* op = std::get_if<OptimizeSpec>(&man.spec)) {
    sum.add("resolved.M_max", op->M_max);
    sum.add("resolved.branches", std::to_string(std::uint64_t{1} << op->M_max));
  } else {
    man.config.validate(res.shots == 0);
    times(man.config, "resolved.");
    sum.add("resolved.branches", std::to_string(std::uint64_t{1} << man.config.M));
  }
  return sum.str();
}

}  // namespace qecsense
