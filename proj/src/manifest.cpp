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

#include "qecsense/manifest.hpp"

#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

namespace qecsense {

using nlohmann::json;

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::VirtualPhase: return "virtual_phase";
    case ExperimentKind::QecSweep: return "qec_sweep";
    case ExperimentKind::Radiometry: return "radiometry";
    case ExperimentKind::Optimize: return "optimize";
    case ExperimentKind::Wigner: return "wigner";
  }
  return "?";
}

namespace {

class Reader {
 public:
  Reader(const json& node, std::string path, std::string_view source)
      : node_(node), path_(std::move(path)), source_(source) {
    if (!node_.is_object()) fail(path_.empty() ? "manifest" : path_, "expected an object");
  }

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw ManifestError(std::string(source_) + ": " + field + ": " + what);
  }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const char* key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  bool has(const char* key) const { return node_.contains(key); }

  double number(const char* key, std::optional<double> fallback = std::nullopt) {
    const json* v = find(key);
    if (!v) {
      if (!fallback) fail(field(key), "required field missing");
      return *fallback;
    }
    if (!v->is_number()) fail(field(key), "expected a number");
    return v->get<double>();
  }

  long integer(const char* key, std::optional<long> fallback = std::nullopt) {
    const json* v = find(key);
    if (!v) {
      if (!fallback) fail(field(key), "required field missing");
      return *fallback;
    }
    if (!v->is_number_integer()) fail(field(key), "expected an integer");
    return v->get<long>();
  }

  std::optional<double> optional_number(const char* key) {
    if (!has(key)) {
      seen_.insert(key);
      return std::nullopt;
    }
    return number(key);
  }

  std::string text(const char* key, std::optional<std::string> fallback = std::nullopt) {
    const json* v = find(key);
    if (!v) {
      if (!fallback) fail(field(key), "required field missing");
      return *fallback;
    }
    if (!v->is_string()) fail(field(key), "expected a string");
    return v->get<std::string>();
  }

  const json& array(const char* key) {
    const json* v = find(key);
    if (!v) fail(field(key), "required field missing");
    if (!v->is_array()) fail(field(key), "expected an array");
    return *v;
  }

  Reader child(const char* key) {
    const json* v = find(key);
    static const json empty = json::object();
    return Reader(v ? *v : empty, field(key), source_);
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key())) fail(field(it.key().c_str()), "unknown key '" + it.key() + "'");
    }
  }

  std::string_view source() const { return source_; }
  const std::string& path() const { return path_; }

 private:
  const json& node_;
  std::string path_;
  std::string_view source_;
  std::set<std::string> seen_;
};

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  // nlohmann reports the position one past the offending character.
  if (col > 1) --col;
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <typename Fn>
auto guarded(const Reader& r, const std::string& field, Fn fn) {
  try {
    return fn();
  } catch (const ManifestError&) {
    throw;
  } catch (const std::exception& e) {
    r.fail(field, e.what());
  }
}

Strategy strategy_value(const Reader& r, const std::string& field, const json& v) {
  if (!v.is_string()) r.fail(field, "expected a strategy name");
  return guarded(r, field, [&] { return parse_strategy(v.get<std::string>()); });
}

std::vector<Strategy> strategies(Reader& r, const char* key, std::vector<Strategy> fallback) {
  if (!r.has(key)) {
    r.find(key);
    return fallback;
  }
  const json& a = r.array(key);
  if (a.empty()) r.fail(r.field(key), "must not be empty");
  std::vector<Strategy> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.push_back(strategy_value(r, r.field(key) + "[" + std::to_string(i) + "]", a[i]));
  }
  return out;
}

ImperfectionModel read_imperfections(Reader r) {
  ImperfectionModel imp;
  imp.eps_qec = r.number("eps_qec", 0.0);
  imp.eps_readout = r.number("eps_readout", 0.0);
  imp.eps_reset = r.number("eps_reset", 0.0);
  r.finish();
  return imp;
}

CodeSpec<> read_code(Reader r, Eigen::Index dim) {
  const long m = r.integer("m");
  const long n = r.integer("n");
  const std::optional<double> alpha = r.optional_number("alpha");
  const double phi0 = r.number("phi0", 0.0);
  r.finish();
  return guarded(r, r.path(), [&] {
    return alpha ? CodeSpec<>::from_alpha(static_cast<int>(m), static_cast<int>(n), *alpha, phi0, dim)
                 : CodeSpec<>::balanced(static_cast<int>(m), static_cast<int>(n), phi0, dim);
  });
}

ExperimentConfig read_config(Reader r) {
  ExperimentConfig cfg;
  const long dim = r.integer("dim", kDefaultDim);
  if (dim < 2) r.fail(r.field("dim"), "must be >= 2");
  if (r.has("code")) {
    cfg.code = read_code(r.child("code"), dim);
  } else {
    r.find("code");
    cfg.code = CodeSpec<>::balanced(1, 3, 0.0, dim);
  }
  cfg.T1 = r.number("T1", cfg.T1);
  cfg.omega = r.number("omega", cfg.omega);
  cfg.tau_int = r.number("tau_int", cfg.tau_int);
  cfg.M = static_cast<int>(r.integer("M", cfg.M));
  cfg.k_max = static_cast<int>(r.integer("k_max", cfg.k_max));
  cfg.dephasing_rate = r.number("dephasing_rate", cfg.dephasing_rate);
  cfg.phi1 = r.number("phi1", cfg.phi1);
  const long points = r.integer("phi0_points", 24);
  if (points < 3) r.fail(r.field("phi0_points"), "must be >= 3");
  cfg.phi0_grid = uniform_phase_grid(static_cast<int>(points));

  Reader o = r.child("overheads");
  cfg.overheads.t_init = o.number("t_init", cfg.overheads.t_init);
  cfg.overheads.t_encode = o.number("t_encode", cfg.overheads.t_encode);
  cfg.overheads.t_qec_pulse = o.number("t_qec_pulse", cfg.overheads.t_qec_pulse);
  cfg.overheads.t_readout = o.number("t_readout", cfg.overheads.t_readout);
  cfg.overheads.t_reset = o.number("t_reset", cfg.overheads.t_reset);
  cfg.overheads.t_decode = o.number("t_decode", cfg.overheads.t_decode);
  o.finish();
  cfg.imperfections = read_imperfections(r.child("imperfections"));
  r.finish();
  guarded(r, r.path(), [&] {
    cfg.validate(false);
    return 0;
  });
  return cfg;
}

std::vector<int> int_list(Reader& r, const char* key) {
  const json& a = r.array(key);
  if (a.empty()) r.fail(r.field(key), "must not be empty");
  std::vector<int> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number_integer()) r.fail(r.field(key) + "[" + std::to_string(i) + "]", "expected an integer");
    out.push_back(a[i].get<int>());
  }
  return out;
}

std::vector<double> t_int_grid(Reader& r, const char* key, double T1) {
  const json* v = r.find(key);
  const std::string field = r.field(key);
  if (!v) r.fail(field, "required field missing");
  std::vector<double> out;
  if (v->is_array()) {
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number()) r.fail(field + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back((*v)[i].get<double>());
    }
  } else {
    Reader g(*v, field, r.source());
    const double from = g.number("from_T1");
    const double to = g.number("to_T1");
    const long points = g.integer("points");
    g.finish();
    if (!(from > 0.0 && to > from && points >= 2)) {
      g.fail(field, "need 0 < from_T1 < to_T1 and points >= 2");
    }
    const double step = std::log(to / from) / static_cast<double>(points - 1);
    for (long i = 0; i < points; ++i) out.push_back(T1 * from * std::exp(step * static_cast<double>(i)));
  }
  if (out.empty()) r.fail(field, "must not be empty");
  for (double t : out) {
    if (!(t > 0.0)) r.fail(field, "values must be > 0");
  }
  return out;
}

}  // namespace

RunManifest parse_manifest(std::string_view text, std::string_view source,
                           std::optional<long> sampled_shots) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    const auto colon = what.rfind(": ");
    throw ManifestError(std::string(source) + ": syntax error at " + line_column(text, e.byte) + ": " +
                        (colon == std::string::npos ? what : what.substr(colon + 2)));
  }

  Reader root(doc, "", source);
  RunManifest man;
  man.schema_version = static_cast<int>(root.integer("schema_version"));
  if (man.schema_version != kSchemaVersion) {
    root.fail("schema_version", "unsupported version " + std::to_string(man.schema_version) +
                                    " (this build reads " + std::to_string(kSchemaVersion) + ")");
  }
  const std::string kind = root.text("kind");
  if (kind == "virtual_phase") {
    man.kind = ExperimentKind::VirtualPhase;
  } else if (kind == "qec_sweep") {
    man.kind = ExperimentKind::QecSweep;
  } else if (kind == "radiometry") {
    man.kind = ExperimentKind::Radiometry;
  } else if (kind == "optimize") {
    man.kind = ExperimentKind::Optimize;
  } else if (kind == "wigner") {
    man.kind = ExperimentKind::Wigner;
  } else {
    root.fail("kind", "unknown experiment kind '" + kind +
                          "' (expected virtual_phase, qec_sweep, radiometry, optimize or wigner)");
  }

  std::string stem = std::filesystem::path(std::string(source)).stem().string();
  if (stem.empty()) stem = std::string(to_string(man.kind));
  man.name = root.text("name", stem);
  if (man.name.empty() || man.name.find('/') != std::string::npos) {
    root.fail("name", "must be a non-empty file stem");
  }

  if (const json* s = root.find("seed")) {
    if (!s->is_number_unsigned()) root.fail("seed", "expected a non-negative integer");
    man.seed = s->get<std::uint64_t>();
  }
  man.sampled_shots = root.integer("sampled_shots", 0);
  if (man.sampled_shots < 0) root.fail("sampled_shots", "must be >= 0");
  if (sampled_shots) man.sampled_shots = *sampled_shots;

  Reader out = root.child("outputs");
  man.results_file = out.text("results", man.name + "_results.csv");
  man.summary_file = out.text("summary", man.name + "_summary.txt");
  out.finish();

  man.config = read_config(root.child("config"));
  const ExperimentConfig& cfg = man.config;

  const std::string block(to_string(man.kind));
  Reader b = root.child(block.c_str());
  switch (man.kind) {
    case ExperimentKind::VirtualPhase: {
      VirtualPhaseSpec s;
      s.strategies = strategies(b, "strategies", s.strategies);
      if (b.has("M_values")) {
        s.M_values = int_list(b, "M_values");
      } else {
        b.find("M_values");
        s.M_values = {cfg.M};
      }
      for (int M : s.M_values) {
        if (M < 1) b.fail(b.field("M_values"), "round counts must be >= 1");
      }
      s.chi = b.optional_number("chi");
      if (s.chi && !(*s.chi > 0.0)) b.fail(b.field("chi"), "must be > 0");
      b.finish();
      const bool exact = man.sampled_shots == 0;
      for (int M : s.M_values) {
        ExperimentConfig probe = cfg;
        probe.M = M;
        guarded(b, b.field("M_values"), [&] {
          probe.validate(exact);
          return 0;
        });
      }
      man.spec = std::move(s);
      break;
    }
    case ExperimentKind::QecSweep: {
      QecSweepSpec s;
      s.strategies = strategies(b, "strategies", s.strategies);
      s.t_int = t_int_grid(b, "t_int", cfg.T1);
      s.M_max = static_cast<int>(b.integer("M_max", s.M_max));
      if (s.M_max < 1 || s.M_max > kMaxExactRounds) {
        b.fail(b.field("M_max"), "M_max=" + std::to_string(s.M_max) +
                                     " would branch into 2^M_max outcome strings; allowed 1.." +
                                     std::to_string(kMaxExactRounds));
      }
      if (!(cfg.tau_int > 0.0)) root.fail("config.tau_int", "must be > 0 for a sweep");
      b.finish();
      man.spec = std::move(s);
      break;
    }
    case ExperimentKind::Radiometry: {
      RadiometrySpec s;
      const json& runs = b.array("runs");
      if (runs.empty()) b.fail(b.field("runs"), "must not be empty");
      for (std::size_t i = 0; i < runs.size(); ++i) {
        Reader r(runs[i], b.field("runs") + "[" + std::to_string(i) + "]", source);
        RadiometryRun run;
        run.m = static_cast<int>(r.integer("m"));
        run.n = static_cast<int>(r.integer("n"));
        run.alpha = r.optional_number("alpha");
        run.strategy = strategy_value(r, r.field("strategy"), *[&] {
          const json* v = r.find("strategy");
          if (!v) r.fail(r.field("strategy"), "required field missing");
          return v;
        }());
        run.tau_int = r.optional_number("tau_int");
        if (r.has("M")) {
          run.M = static_cast<int>(r.integer("M"));
        } else {
          r.find("M");
        }
        if (r.has("imperfections")) {
          run.imperfections = read_imperfections(r.child("imperfections"));
        } else {
          r.find("imperfections");
        }
        r.finish();
        guarded(r, r.path(), [&] {
          ExperimentConfig probe = cfg;
          probe.code = run.alpha ? CodeSpec<>::from_alpha(run.m, run.n, *run.alpha, 0.0, cfg.dim())
                                 : CodeSpec<>::balanced(run.m, run.n, 0.0, cfg.dim());
          if (run.imperfections) probe.imperfections = *run.imperfections;
          if (run.tau_int) probe.tau_int = *run.tau_int;
          if (run.M) probe.M = *run.M;
          probe.validate(man.sampled_shots == 0);
          if (run.strategy == Strategy::QEC || run.strategy == Strategy::QEC_QJT) {
            QecInstrument(probe.code, probe.tau_int, probe.T1, probe.imperfections);
          }
          return 0;
        });
        s.runs.push_back(run);
      }
      s.chi = b.number("chi", s.chi);
      if (!(s.chi > 0.0)) b.fail(b.field("chi"), "must be > 0");
      s.p_step = b.number("p_step", s.p_step);
      if (!(s.p_step > 0.0 && 4.0 * s.p_step <= 1.0)) b.fail(b.field("p_step"), "must lie in (0, 0.25]");
      b.finish();
      man.spec = std::move(s);
      break;
    }
    case ExperimentKind::Optimize: {
      OptimizeSpec s;
      if (const json* v = b.find("strategy")) s.strategy = strategy_value(b, b.field("strategy"), *v);
      s.tau_min = b.number("tau_min", 0.01 * cfg.T1);
      s.tau_max = b.number("tau_max", cfg.T1);
      s.M_max = static_cast<int>(b.integer("M_max", s.M_max));
      s.alpha_points = static_cast<int>(b.integer("alpha_points", s.alpha_points));
      s.tau_points = static_cast<int>(b.integer("tau_points", s.tau_points));
      s.max_iterations = static_cast<int>(b.integer("max_iterations", s.max_iterations));
      s.tolerance = b.number("tolerance", s.tolerance);
      b.finish();
      guarded(b, block, [&] {
        OptimizationProblem p;
        p.base = cfg;
        p.strategy = s.strategy;
        p.tau_min = s.tau_min;
        p.tau_max = s.tau_max;
        p.M_max = s.M_max;
        p.alpha_points = s.alpha_points;
        p.tau_points = s.tau_points;
        p.max_iterations = s.max_iterations;
        p.tolerance = s.tolerance;
        p.validate();
        return 0;
      });
      man.spec = std::move(s);
      break;
    }
    case ExperimentKind::Wigner: {
      WignerSpec s;
      const std::string stage = b.text("stage", "encoded");
      if (stage == "encoded") {
        s.stage = WignerStage::Encoded;
      } else if (stage == "error") {
        s.stage = WignerStage::Error;
      } else if (stage == "recovered") {
        s.stage = WignerStage::Recovered;
      } else {
        b.fail(b.field("stage"), "unknown stage '" + stage + "' (expected encoded, error or recovered)");
      }
      s.re_min = b.number("re_min", s.re_min);
      s.re_max = b.number("re_max", s.re_max);
      s.im_min = b.number("im_min", s.im_min);
      s.im_max = b.number("im_max", s.im_max);
      s.re_points = static_cast<int>(b.integer("re_points", s.re_points));
      s.im_points = static_cast<int>(b.integer("im_points", s.im_points));
      s.working_dim = static_cast<int>(b.integer("working_dim", 0));
      b.finish();
      if (!(s.re_max > s.re_min && s.im_max > s.im_min)) b.fail(block, "grid bounds must be increasing");
      if (s.re_points < 2 || s.im_points < 2) b.fail(block, "grids need at least 2 points per axis");
      if (s.working_dim < 0) b.fail(b.field("working_dim"), "must be >= 0");
      if (s.stage != WignerStage::Encoded && cfg.code.m() < 1) {
        b.fail(b.field("stage"), "a single-photon loss is uncorrectable for m = 0");
      }
      man.spec = s;
      break;
    }
  }
  root.finish();
  return man;
}

RunManifest load_manifest(const std::filesystem::path& path, std::optional<long> sampled_shots) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError(path.string() + ": cannot open manifest");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), path.string(), sampled_shots);
}

}  // namespace qecsense
