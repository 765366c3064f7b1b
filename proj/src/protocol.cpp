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

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "qecsense/analysis.hpp"

namespace qecsense {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::TLS: return "TLS";
    case Strategy::NoQEC: return "NoQEC";
    case Strategy::QEC: return "QEC";
    case Strategy::QEC_QJT: return "QEC+QJT";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "TLS") return Strategy::TLS;
  if (name == "NoQEC") return Strategy::NoQEC;
  if (name == "QEC") return Strategy::QEC;
  if (name == "QEC+QJT") return Strategy::QEC_QJT;
  throw std::invalid_argument("unknown strategy '" + std::string(name) +
                              "' (expected TLS, NoQEC, QEC or QEC+QJT)");
}

void ImperfectionModel::validate() const {
  auto check = [](double v, const char* name) {
    detail::require(v >= 0.0 && v <= 1.0, std::string("imperfections.") + name + " must lie in [0, 1]");
  };
  check(eps_qec, "eps_qec");
  check(eps_readout, "eps_readout");
  check(eps_reset, "eps_reset");
}

std::vector<double> uniform_phase_grid(int points) {
  detail::require(points >= 3, "uniform_phase_grid: need at least 3 points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = 2.0 * std::numbers::pi * i / points;
  return grid;
}

void ExperimentConfig::validate(bool exact) const {
  detail::require(T1 > 0.0, "T1 must be > 0");
  detail::require(tau_int >= 0.0, "tau_int must be >= 0");
  detail::require(M >= 1, "M must be >= 1");
  detail::require(!phi0_grid.empty(), "phi0_grid must not be empty");
  detail::require(k_max < dim(), "k_max must be < dim");
  detail::require(dephasing_rate >= 0.0, "dephasing_rate must be >= 0");
  const auto& o = overheads;
  for (double t : {o.t_init, o.t_encode, o.t_qec_pulse, o.t_readout, o.t_reset, o.t_decode}) {
    detail::require(t >= 0.0, "overheads must be >= 0");
  }
  imperfections.validate();
  if (exact && M > kMaxExactRounds) {
    std::ostringstream msg;
    msg << "M=" << M << " would branch into 2^" << M
        << " outcome strings; exact mode allows M <= " << kMaxExactRounds;
    throw BranchLimitError(msg.str());
  }
}

double total_time(const ExperimentConfig& config, Strategy strategy) {
  const auto& o = config.overheads;
  if (strategy == Strategy::QEC || strategy == Strategy::QEC_QJT) {
    return o.t_init + o.t_encode +
           config.M * (config.tau_int + o.t_qec_pulse + o.t_readout + o.t_reset) + o.t_decode +
           o.t_readout;
  }
  return o.t_init + o.t_encode + config.t_int() + o.t_decode + o.t_readout;
}

double acquired_phase(const CodeSpec<>& code, double omega, double t) {
  return code.gap() * omega * t;
}

ExperimentConfig tls_config(const ExperimentConfig& config) {
  ExperimentConfig out = config;
  out.code = CodeSpec<>::tls(config.code.phi0(), config.code.dim());
  return out;
}

std::vector<double> FringeDataset::merged(Outcome l) const {
  std::vector<double> out(phi0.size(), 0.0);
  for (const auto& cls : probability) {
    const auto& p = cls[static_cast<std::size_t>(l)];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += p[i];
  }
  return out;
}

std::vector<double> RadiometryCurves::merged(Outcome l) const {
  std::vector<double> out(p.size(), 0.0);
  for (const auto& cls : probability) {
    const auto& v = cls[static_cast<std::size_t>(l)];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// QecInstrument

QecInstrument::QecInstrument(const CodeSpec<>& code, double tau, double T1,
                             const ImperfectionModel& imperfections, double omega, int k_max,
                             double dephasing_rate)
    : dim_(code.dim()),
      n_(code.n()),
      channel_(damping_kraus<double>(tau, T1, code.dim(),
                                     k_max < 0 ? static_cast<int>(code.dim()) - 1 : k_max,
                                     dephasing_rate)),
      phase_(phase_unitary<double>(omega, tau, code.dim()).diagonal()),
      error_levels_{code.m() - 1, code.n() - 1},
      recovery_(),
      code_mixed_(CMatrix<double>::Zero(code.dim(), code.dim())),
      imp_(imperfections) {
  detail::require(code.m() >= 1, "qec_instrument: m = 0 leaves single-photon loss uncorrectable");
  detail::require(code.n() >= code.m() + 2,
                  "qec_instrument: n = m + 1 puts the error level n-1 inside the code space");
  imp_.validate();
  recovery_ = transpose_recovery(code, 1).matrix.elems();
  code_mixed_(code.m(), code.m()) = 0.5;
  code_mixed_(code.n(), code.n()) = 0.5;
}

std::array<CMatrix<double>, 2> QecInstrument::apply_true(const CMatrix<double>& x) const {
  const CMatrix<double> rotated = phase_.asDiagonal() * x * phase_.conjugate().asDiagonal();
  const CMatrix<double> y = kraus_sum(channel_, rotated);

  std::vector<bool> in_error(static_cast<std::size_t>(dim_), false);
  for (Eigen::Index k : error_levels_) in_error[static_cast<std::size_t>(k)] = true;

  CMatrix<double> stay = CMatrix<double>::Zero(dim_, dim_);
  CMatrix<double> flagged = CMatrix<double>::Zero(dim_, dim_);
  for (Eigen::Index c = 0; c < dim_; ++c) {
    for (Eigen::Index r = 0; r < dim_; ++r) {
      const bool er = in_error[static_cast<std::size_t>(r)];
      const bool ec = in_error[static_cast<std::size_t>(c)];
      if (er && ec) {
        flagged(r, c) = y(r, c);
      } else if (!er && !ec) {
        stay(r, c) = y(r, c);
      }
    }
  }
  std::array<CMatrix<double>, 2> out{stay, recovery_ * flagged * recovery_.adjoint()};

  if (imp_.eps_qec > 0.0) {
    for (auto& t : out) {
      const double tr = t.trace().real();
      t = (1.0 - imp_.eps_qec) * t + (imp_.eps_qec * tr) * code_mixed_;
    }
  }
  return out;
}

std::array<CMatrix<double>, 2> QecInstrument::apply_recorded(const CMatrix<double>& x) const {
  auto t = apply_true(x);
  const double eps = imp_.eps_readout;
  if (eps == 0.0) return t;
  return {(1.0 - eps) * t[0] + eps * t[1], (1.0 - eps) * t[1] + eps * t[0]};
}

DensityMatrix<> QecInstrument::apply(const DensityMatrix<>& rho, Outcome recorded) const {
  detail::require(rho.dim() == dim_, "QecInstrument: dimension mismatch");
  return DensityMatrix<>(apply_recorded(rho.elems())[static_cast<std::size_t>(recorded)]);
}

double QecInstrument::probability(const DensityMatrix<>& rho, Outcome recorded) const {
  return apply(rho, recorded).trace();
}

QecInstrument qec_instrument(const CodeSpec<>& code, double tau, double T1,
                             const ImperfectionModel& imperfections, double omega) {
  return QecInstrument(code, tau, T1, imperfections, omega);
}

// ---------------------------------------------------------------------------
// Sequence engine
//
// The encoded state is alpha^2 |m><m| + beta^2 |n><n| + alpha beta
// (e^{-i phi0} |m><n| + h.c.). Every map below is linear and Hermiticity
// preserving, so the three matrix units are propagated once and any phi0 is
// recombined at the end. Dynamics never populate levels above n, so the
// engine works on levels 0..n.

namespace {

using Mat = CMatrix<double>;

struct Units {
  std::array<Mat, 3> u;  // |m><m|, |n><n|, |m><n|

  Units& operator+=(const Units& o) {
    for (std::size_t k = 0; k < 3; ++k) u[k] += o.u[k];
    return *this;
  }
  Units scaled(double w) const {
    Units out = *this;
    for (auto& m : out.u) m *= w;
    return out;
  }
};

CodeSpec<> reduced(const CodeSpec<>& code) { return code.with_dim(code.n() + 1); }

Units encoded_units(const CodeSpec<>& code) {
  const Eigen::Index d = code.dim();
  Units x{{Mat::Zero(d, d), Mat::Zero(d, d), Mat::Zero(d, d)}};
  x.u[0](code.m(), code.m()) = 1.0;
  x.u[1](code.n(), code.n()) = 1.0;
  x.u[2](code.m(), code.n()) = 1.0;
  return x;
}

Mat combine(const Units& x, const CodeSpec<>& code, double phi0) {
  const double a = code.alpha();
  const double b = code.beta();
  const Mat coh = std::polar(a * b, -phi0) * x.u[2];
  return a * a * x.u[0] + b * b * x.u[1] + coh + coh.adjoint();
}

/// Probability of the POVM element against the recombined state.
struct UnitTraces {
  std::array<std::complex<double>, 3> t;

  double at(const CodeSpec<>& code, double phi0) const {
    const double a = code.alpha();
    const double b = code.beta();
    return a * a * t[0].real() + b * b * t[1].real() +
           2.0 * a * b * (std::polar(1.0, -phi0) * t[2]).real();
  }
};

UnitTraces traces(const Units& x, const Mat& pi) {
  UnitTraces out;
  for (std::size_t k = 0; k < 3; ++k) out.t[k] = (pi * x.u[k]).trace();
  return out;
}

void check_complete(const KrausChannel<>& ch, int n) {
  const double defect = ch.completeness_defect(n);
  if (!(defect < 1e-8)) {
    std::ostringstream msg;
    msg << "loss family truncated at k_max=" << ch.k_max() << " is incomplete on levels 0.." << n
        << " (defect " << defect << "); raise k_max to at least " << n;
    throw TruncationError(msg.str());
  }
}

/// Class table indexed [j][pending reset flag].
using ClassTable = std::vector<std::array<std::optional<Units>, 2>>;

std::array<Units, 2> apply_units(const QecInstrument& inst, const Units& x) {
  std::array<Units, 2> out;
  for (std::size_t k = 0; k < 3; ++k) {
    auto r = inst.apply_recorded(x.u[k]);
    out[0].u[k] = std::move(r[0]);
    out[1].u[k] = std::move(r[1]);
  }
  return out;
}

void accumulate(std::optional<Units>& slot, const Units& x) {
  if (slot) {
    *slot += x;
  } else {
    slot = x;
  }
}

ClassTable advance(const QecInstrument& inst, const ClassTable& classes, double eps_reset) {
  ClassTable next(classes.size() + 1);
  for (std::size_t j = 0; j < classes.size(); ++j) {
    for (int f = 0; f < 2; ++f) {
      const auto& x = classes[j][static_cast<std::size_t>(f)];
      if (!x) continue;
      auto rec = apply_units(inst, *x);
      if (f == 1) std::swap(rec[0], rec[1]);
      for (int nf = 0; nf < 2; ++nf) {
        const double w = nf == 1 ? eps_reset : 1.0 - eps_reset;
        if (w == 0.0) continue;
        accumulate(next[j][static_cast<std::size_t>(nf)], rec[0].scaled(w));
        accumulate(next[j + 1][static_cast<std::size_t>(nf)], rec[1].scaled(w));
      }
    }
  }
  return next;
}

FringeDataset decode(const ClassTable& classes, const CodeSpec<>& code, double phi1,
                     double eps_readout, const std::vector<double>& phi0_grid) {
  const auto povm = decode_povm(code, phi1);
  FringeDataset out;
  out.phi0 = phi0_grid;
  out.probability.resize(classes.size());
  for (std::size_t j = 0; j < classes.size(); ++j) {
    auto& cls = out.probability[j];
    cls[0].assign(phi0_grid.size(), 0.0);
    cls[1].assign(phi0_grid.size(), 0.0);
    for (int f = 0; f < 2; ++f) {
      const auto& x = classes[j][static_cast<std::size_t>(f)];
      if (!x) continue;
      const UnitTraces tg = traces(*x, povm.Pi_g.elems());
      const UnitTraces te = traces(*x, povm.Pi_e.elems());
      for (std::size_t i = 0; i < phi0_grid.size(); ++i) {
        const double pg = tg.at(code, phi0_grid[i]);
        const double pe = te.at(code, phi0_grid[i]);
        double rg = (1.0 - eps_readout) * pg + eps_readout * pe;
        double re = (1.0 - eps_readout) * pe + eps_readout * pg;
        if (f == 1) std::swap(rg, re);
        cls[0][i] += rg;
        cls[1][i] += re;
      }
    }
  }
  return out;
}

QecInstrument round_instrument(const ExperimentConfig& config, const CodeSpec<>& code) {
  QecInstrument inst(code, config.tau_int, config.T1, config.imperfections, config.omega,
                     std::min(config.resolved_k_max(), code.n()), config.dephasing_rate);
  check_complete(inst.channel(), code.n());
  return inst;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct TrieNode {
  explicit TrieNode(Mat r) : rho(std::move(r)) {}
  Mat rho;
  bool expanded = false;
  double p_e = 0;
  std::array<Mat, 2> next;
  std::array<int, 4> child{-1, -1, -1, -1};
};

/// Monte Carlo over ancilla records for one initial phase: each shot walks the
/// outcome tree, sampling the jump label from the conditional state, then the
/// classical QEC / readout / reset errors. Conditional states are cached per
/// tree node.
std::vector<std::array<long, 2>> sample_qec_shots(const ExperimentConfig& config, const CodeSpec<>& code,
                                                  double phi0, long shots, std::uint64_t seed) {
  const ImperfectionModel& imp = config.imperfections;
  const QecInstrument pure(code, config.tau_int, config.T1, ImperfectionModel{}, config.omega,
                           std::min(config.resolved_k_max(), code.n()), config.dephasing_rate);
  check_complete(pure.channel(), code.n());
  const auto povm = decode_povm(code, config.phi1);
  Mat mixed = Mat::Zero(code.dim(), code.dim());
  mixed(code.m(), code.m()) = 0.5;
  mixed(code.n(), code.n()) = 0.5;

  std::vector<TrieNode> nodes;
  nodes.emplace_back(DensityMatrix<>(encode(code.with_phi0(phi0))).elems());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<std::array<long, 2>> counts(static_cast<std::size_t>(config.M) + 1, {0, 0});

  for (long s = 0; s < shots; ++s) {
    int node = 0;
    int pending = 0;
    int j = 0;
    for (int r = 0; r < config.M; ++r) {
      if (!nodes[static_cast<std::size_t>(node)].expanded) {
        auto& nd = nodes[static_cast<std::size_t>(node)];
        nd.next = pure.apply_true(nd.rho);
        nd.p_e = nd.next[1].trace().real() / nd.rho.trace().real();
        nd.expanded = true;
      }
      const int label = uni(rng) < nodes[static_cast<std::size_t>(node)].p_e ? 1 : 0;
      const int failed = uni(rng) < imp.eps_qec ? 1 : 0;
      const int flip = uni(rng) < imp.eps_readout ? 1 : 0;
      j += label ^ pending ^ flip;
      pending = uni(rng) < imp.eps_reset ? 1 : 0;

      const int slot = 2 * label + failed;
      int next = nodes[static_cast<std::size_t>(node)].child[static_cast<std::size_t>(slot)];
      if (next < 0) {
        Mat rho;
        if (failed) {
          rho = mixed;
        } else {
          const Mat& t = nodes[static_cast<std::size_t>(node)].next[static_cast<std::size_t>(label)];
          rho = t / t.trace().real();
        }
        next = static_cast<int>(nodes.size());
        nodes[static_cast<std::size_t>(node)].child[static_cast<std::size_t>(slot)] = next;
        nodes.emplace_back(std::move(rho));
      }
      node = next;
    }
    const Mat& rho = nodes[static_cast<std::size_t>(node)].rho;
    const double pg = (povm.Pi_g.elems() * rho).trace().real();
    const int label = uni(rng) < pg ? 0 : 1;
    const int flip = uni(rng) < imp.eps_readout ? 1 : 0;
    counts[static_cast<std::size_t>(j)][static_cast<std::size_t>(label ^ pending ^ flip)] += 1;
  }
  return counts;
}

FringeDataset counts_to_dataset(const std::vector<double>& phi0_grid,
                                const std::vector<std::vector<std::array<long, 2>>>& counts, long shots) {
  FringeDataset out;
  out.phi0 = phi0_grid;
  out.shots = shots;
  const std::size_t classes = counts.front().size();
  out.probability.resize(classes);
  for (std::size_t j = 0; j < classes; ++j) {
    for (std::size_t l = 0; l < 2; ++l) {
      out.probability[j][l].resize(phi0_grid.size());
      for (std::size_t i = 0; i < phi0_grid.size(); ++i) {
        out.probability[j][l][i] = static_cast<double>(counts[i][j][l]) / static_cast<double>(shots);
      }
    }
  }
  return out;
}

Units evolve_free(const ExperimentConfig& config, const CodeSpec<>& code) {
  const double t = config.t_int();
  const auto ch = damping_kraus<double>(t, config.T1, code.dim(),
                                        std::min(config.resolved_k_max(), code.n()),
                                        config.dephasing_rate);
  check_complete(ch, code.n());
  const auto phase = phase_unitary<double>(config.omega, t, code.dim()).diagonal();
  Units x = encoded_units(code);
  for (auto& m : x.u) m = kraus_sum(ch, Mat(phase.asDiagonal() * m * phase.conjugate().asDiagonal()));
  return x;
}

}  // namespace

FringeDataset run_no_qec(const ExperimentConfig& config, const std::optional<SamplingOptions>& sampling) {
  config.validate(false);
  const CodeSpec<> code = reduced(config.code);
  ClassTable classes(1);
  classes[0][0] = evolve_free(config, code);
  FringeDataset exact = decode(classes, code, config.phi1, config.imperfections.eps_readout, config.phi0_grid);
  if (!sampling) return exact;

  detail::require(sampling->shots > 0, "sampling: shots must be > 0");
  std::vector<std::vector<std::array<long, 2>>> counts;
  for (std::size_t i = 0; i < config.phi0_grid.size(); ++i) {
    std::mt19937_64 rng(mix_seed(sampling->seed, i));
    const double pg = std::clamp(exact.P(0, Outcome::g)[i], 0.0, 1.0);
    std::binomial_distribution<long> draw(sampling->shots, pg);
    const long g = draw(rng);
    counts.push_back({{g, sampling->shots - g}});
  }
  return counts_to_dataset(config.phi0_grid, counts, sampling->shots);
}

DensityMatrix<> no_qec_state(const ExperimentConfig& config) {
  config.validate(false);
  const CodeSpec<> code = reduced(config.code);
  const Units x = evolve_free(config, code);
  return DensityMatrix<>(embed(combine(x, code, config.code.phi0()), config.dim()));
}

SequenceResult run_qec_sequence(const ExperimentConfig& config, const SequenceOptions& options) {
  config.validate(!options.sampling.has_value());
  const CodeSpec<> code = reduced(config.code);
  const QecInstrument inst = round_instrument(config, code);
  const double eps_reset = config.imperfections.eps_reset;

  SequenceResult out;
  ClassTable classes(1);
  classes[0][0] = encoded_units(code);
  for (int r = 0; r < config.M; ++r) classes = advance(inst, classes, eps_reset);

  out.fringes = decode(classes, code, config.phi1, config.imperfections.eps_readout, config.phi0_grid);
  for (const auto& cls : classes) {
    Mat acc = Mat::Zero(code.dim(), code.dim());
    for (const auto& x : cls) {
      if (x) acc += combine(*x, code, config.code.phi0());
    }
    out.class_states.emplace_back(embed(acc, config.dim()));
  }

  if (options.sampling) {
    detail::require(options.sampling->shots > 0, "sampling: shots must be > 0");
    std::vector<std::vector<std::array<long, 2>>> counts;
    for (std::size_t i = 0; i < config.phi0_grid.size(); ++i) {
      counts.push_back(sample_qec_shots(config, code, config.phi0_grid[i], options.sampling->shots,
                                        mix_seed(options.sampling->seed, i)));
    }
    out.fringes = counts_to_dataset(config.phi0_grid, counts, options.sampling->shots);
  }

  if (options.records) {
    if (config.M > kMaxExactRounds) {
      throw BranchLimitError("trajectory records need M <= " + std::to_string(kMaxExactRounds));
    }
    struct Branch {
      std::vector<Outcome> outcomes;
      int pending;
      Mat x;
    };
    std::vector<Branch> branches{{{}, 0, DensityMatrix<>(encode(code)).elems()}};
    for (int r = 0; r < config.M; ++r) {
      std::vector<Branch> next;
      next.reserve(branches.size() * 4);
      for (const auto& b : branches) {
        auto rec = inst.apply_recorded(b.x);
        if (b.pending == 1) std::swap(rec[0], rec[1]);
        for (int l = 0; l < 2; ++l) {
          for (int nf = 0; nf < 2; ++nf) {
            const double w = nf == 1 ? eps_reset : 1.0 - eps_reset;
            if (w == 0.0) continue;
            Branch nb{b.outcomes, nf, w * rec[static_cast<std::size_t>(l)]};
            nb.outcomes.push_back(static_cast<Outcome>(l));
            next.push_back(std::move(nb));
          }
        }
      }
      branches = std::move(next);
    }
    std::map<std::vector<Outcome>, Mat> merged;
    for (auto& b : branches) {
      auto it = merged.find(b.outcomes);
      if (it == merged.end()) {
        merged.emplace(std::move(b.outcomes), std::move(b.x));
      } else {
        it->second += b.x;
      }
    }
    out.records.reserve(merged.size());
    for (auto& [outcomes, x] : merged) {
      TrajectoryRecord rec{outcomes, 0, x.trace().real(), DensityMatrix<>(Mat::Zero(2, 2))};
      for (Outcome o : outcomes) rec.j += o == Outcome::e ? 1 : 0;
      const Mat normalized = rec.prob > 0.0 ? Mat(x / rec.prob) : Mat(Mat::Zero(x.rows(), x.cols()));
      rec.rho_cond = DensityMatrix<>(embed(normalized, config.dim()));
      out.records.push_back(std::move(rec));
    }
  }
  return out;
}

std::vector<FringeDataset> run_qec_rounds(const ExperimentConfig& config) {
  config.validate(true);
  const CodeSpec<> code = reduced(config.code);
  const QecInstrument inst = round_instrument(config, code);
  std::vector<FringeDataset> out;
  ClassTable classes(1);
  classes[0][0] = encoded_units(code);
  for (int r = 0; r < config.M; ++r) {
    classes = advance(inst, classes, config.imperfections.eps_reset);
    out.push_back(decode(classes, code, config.phi1, config.imperfections.eps_readout, config.phi0_grid));
  }
  return out;
}

FringeDataset run_strategy(const ExperimentConfig& config, Strategy strategy,
                           const std::optional<SamplingOptions>& sampling) {
  switch (strategy) {
    case Strategy::TLS: return run_no_qec(tls_config(config), sampling);
    case Strategy::NoQEC: return run_no_qec(config, sampling);
    case Strategy::QEC:
    case Strategy::QEC_QJT: return run_qec_sequence(config, SequenceOptions{false, sampling}).fringes;
  }
  throw std::invalid_argument("run_strategy: unknown strategy");
}

double max_slope_phi0(const ExperimentConfig& config, Strategy strategy) {
  ExperimentConfig probe = config;
  probe.omega = 0.0;
  probe.phi0_grid = uniform_phase_grid(24);
  const FringeDataset data = run_strategy(probe, strategy);
  const FringeFit fit = fit_fringe(data.phi0, data.merged(Outcome::g));
  // P_g = A + B cos(phi0 + phi - (n-m) omega t) is steepest in omega when the
  // argument is pi/2 at omega = 0.
  double phi0 = std::numbers::pi / 2.0 - fit.phi;
  phi0 = std::fmod(phi0, 2.0 * std::numbers::pi);
  if (phi0 < 0.0) phi0 += 2.0 * std::numbers::pi;
  return phi0;
}

RadiometryCurves run_radiometry(const ExperimentConfig& config, std::span<const double> p_grid,
                                double chi, Strategy strategy,
                                const std::optional<SamplingOptions>& sampling) {
  detail::require(chi > 0.0, "run_radiometry: chi must be > 0");
  detail::require(!p_grid.empty(), "run_radiometry: empty population grid");
  for (double p : p_grid) detail::require(p >= 0.0 && p <= 1.0, "run_radiometry: p must lie in [0, 1]");

  RadiometryCurves out;
  out.p.assign(p_grid.begin(), p_grid.end());
  out.chi = chi;
  out.strategy = strategy;
  out.phi0 = max_slope_phi0(config, strategy);

  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    ExperimentConfig point = config;
    point.omega = chi * p_grid[i];
    point.phi0_grid = {out.phi0};
    std::optional<SamplingOptions> s;
    if (sampling) s = SamplingOptions{sampling->shots, mix_seed(sampling->seed, 1000003 + i)};
    const FringeDataset data = run_strategy(point, strategy, s);
    if (out.probability.empty()) {
      out.probability.resize(static_cast<std::size_t>(data.classes()));
      for (auto& cls : out.probability) {
        cls[0].resize(p_grid.size());
        cls[1].resize(p_grid.size());
      }
    }
    for (int j = 0; j < data.classes(); ++j) {
      out.probability[static_cast<std::size_t>(j)][0][i] = data.P(j, Outcome::g)[0];
      out.probability[static_cast<std::size_t>(j)][1][i] = data.P(j, Outcome::e)[0];
    }
  }
  return out;
}

}  // namespace qecsense
