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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qecsense/analysis.hpp"

namespace fs = std::filesystem;

namespace {

struct CommandResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("qecsense_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }

  CommandResult cli(const std::string& args) const {
    const std::string cmd = std::string("\"") + QECSENSE_CLI + "\" " + args + " > \"" +
                            (dir_ / "stdout.txt").string() + "\" 2> \"" + (dir_ / "stderr.txt").string() +
                            "\"";
    const int status = std::system(cmd.c_str());
    CommandResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(dir_ / "stdout.txt");
    r.err = slurp(dir_ / "stderr.txt");
    return r;
  }

  fs::path dir_;
};

std::string manifest(const std::string& name) { return std::string(QECSENSE_MANIFEST_DIR) + "/" + name; }

std::map<std::string, std::string> read_summary(const fs::path& p) {
  std::map<std::string, std::string> kv;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

const char* kMinimal = R"({"schema_version": 1, "kind": "virtual_phase", "config": {"M": 2}})";

}  // namespace

TEST_F(CliTest, validate_accepts_shipped_manifests) {
  for (const char* name : {"fringe_rounds.json", "sweep.json", "radiometry.json", "optimize.json",
                           "wigner_encoded.json", "experiment_like_radiometry.json"}) {
    const auto r = cli("validate \"" + manifest(name) + "\"");
    EXPECT_EQ(r.code, 0) << name << r.err;
    EXPECT_EQ(r.out.rfind("status = ok", 0), 0u) << name;
  }
}

TEST_F(CliTest, validate_reports_resolved_values) {
  const auto r = cli("validate \"" + write("m.json", kMinimal).string() + "\"");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("config.M = 2"), std::string::npos);
  EXPECT_NE(r.out.find("config.k_max = 19"), std::string::npos);
}

TEST_F(CliTest, unknown_key_names_its_path) {
  const auto p = write("m.json", R"({"schema_version": 1, "kind": "virtual_phase",
    "config": {"overheads": {"t_inti": 1e-4}}})");
  const auto r = cli("validate \"" + p.string() + "\"");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("config.overheads.t_inti: unknown key 't_inti'"), std::string::npos) << r.err;
}

TEST_F(CliTest, syntax_error_reports_line_and_column) {
  const auto p = write("m.json", "{\"schema_version\": 1,\n \"kind\": \"virtual_phase\",\n \"config\": {\"M\": 2,,}}");
  const auto r = cli("validate \"" + p.string() + "\"");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3, column"), std::string::npos) << r.err;
}

TEST_F(CliTest, branch_limit_is_enforced_in_exact_mode_only) {
  const auto p = write("m.json", R"({"schema_version": 1, "kind": "virtual_phase", "config": {"M": 20},
    "virtual_phase": {"strategies": ["QEC+QJT"]}})");
  const auto exact = cli("run \"" + p.string() + "\" --output-dir \"" + dir_.string() + "\"");
  EXPECT_EQ(exact.code, 2);
  EXPECT_NE(exact.err.find("M=20 would branch into 2^20 outcome strings; exact mode allows M <= 16"),
            std::string::npos)
      << exact.err;
  EXPECT_FALSE(fs::exists(dir_ / "m_results.csv"));
  const auto sampled = cli("run \"" + p.string() + "\" --sampled 200 --seed 5 --output-dir \"" +
                           dir_.string() + "\"");
  EXPECT_EQ(sampled.code, 0) << sampled.err;
  EXPECT_TRUE(fs::exists(dir_ / "m_results.csv"));
}

TEST_F(CliTest, invalid_values_are_rejected) {
  const std::vector<std::string> bad{
      R"({"schema_version": 1, "kind": "virtual_phase", "config": {"tau_int": -1e-6}})",
      R"({"schema_version": 1, "kind": "virtual_phase", "config": {"T1": 0}})",
      R"({"schema_version": 1, "kind": "virtual_phase", "config": {"code": {"m": 3, "n": 1}}})",
      R"({"schema_version": 1, "kind": "virtual_phase", "config": {"code": {"m": 1, "n": 3, "alpha": 1.5}}})",
      R"({"schema_version": 1, "kind": "virtual_phase", "config": {"imperfections": {"eps_qec": 2}}})",
      R"({"schema_version": 2, "kind": "virtual_phase"})",
      R"({"schema_version": 1, "kind": "tomography"})",
      R"({"schema_version": 1, "kind": "virtual_phase", "config": {"M": "two"}})",
  };
  for (const auto& text : bad) {
    const auto r = cli("validate \"" + write("m.json", text).string() + "\"");
    EXPECT_EQ(r.code, 2) << text;
    EXPECT_NE(r.err.find("error: "), std::string::npos) << text;
  }
  EXPECT_EQ(cli("validate \"" + (dir_ / "missing.json").string() + "\"").code, 2);
}

TEST_F(CliTest, sampled_mode_is_only_for_virtual_phase) {
  const auto r = cli("run \"" + manifest("radiometry.json") + "\" --sampled 100 --output-dir \"" +
                     dir_.string() + "\"");
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, reruns_are_byte_identical) {
  const auto p = write("m.json", kMinimal);
  for (const std::string& extra : {std::string(), std::string("--sampled 500 --seed 11")}) {
    ASSERT_EQ(cli("run \"" + p.string() + "\" --output-dir \"" + (dir_ / "a").string() + "\" " + extra).code, 0);
    ASSERT_EQ(cli("run \"" + p.string() + "\" --threads 3 --output-dir \"" + (dir_ / "b").string() + "\" " +
                  extra)
                  .code,
              0);
    EXPECT_EQ(slurp(dir_ / "a" / "m_results.csv"), slurp(dir_ / "b" / "m_results.csv")) << extra;
    EXPECT_EQ(slurp(dir_ / "a" / "m_summary.txt"), slurp(dir_ / "b" / "m_summary.txt")) << extra;
  }
}

TEST_F(CliTest, different_seeds_differ) {
  const auto p = write("m.json", kMinimal);
  ASSERT_EQ(cli("run \"" + p.string() + "\" --sampled 500 --seed 1 --output-dir \"" + (dir_ / "a").string() + "\"").code, 0);
  ASSERT_EQ(cli("run \"" + p.string() + "\" --sampled 500 --seed 2 --output-dir \"" + (dir_ / "b").string() + "\"").code, 0);
  EXPECT_NE(slurp(dir_ / "a" / "m_results.csv"), slurp(dir_ / "b" / "m_results.csv"));
}

TEST_F(CliTest, results_refit_to_summary) {
  const auto r = cli("run \"" + manifest("fringe_rounds.json") + "\" --output-dir \"" + dir_.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(dir_ / "fringe_rounds_results.csv");
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows[0], (std::vector<std::string>{"strategy", "M", "t_int[s]", "phi0[rad]", "j", "outcome",
                                                "probability"}));
  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> merged;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 7u);
    if (rows[i][5] != "g") continue;
    merged[{rows[i][0], rows[i][1]}][rows[i][3]] += std::stod(rows[i][6]);
  }
  const auto summary = read_summary(dir_ / "fringe_rounds_summary.txt");
  EXPECT_EQ(merged.size(), 40u);
  for (const auto& [key, by_phase] : merged) {
    std::vector<double> phi0;
    std::vector<double> P;
    for (const auto& [phase, p] : by_phase) {
      phi0.push_back(std::stod(phase));
      P.push_back(p);
    }
    const auto fit = qecsense::fit_fringe(phi0, P);
    const std::string prefix = "result." + key.first + ".M" + key.second + ".fit.";
    ASSERT_TRUE(summary.count(prefix + "A")) << prefix;
    EXPECT_NEAR(fit.A, std::stod(summary.at(prefix + "A")), 1e-12) << prefix;
    EXPECT_NEAR(fit.B, std::stod(summary.at(prefix + "B")), 1e-12) << prefix;
  }
}

TEST_F(CliTest, every_kind_writes_both_artifacts) {
  for (const char* stem : {"sweep", "radiometry", "optimize", "wigner_encoded"}) {
    const auto r = cli("run \"" + manifest(std::string(stem) + ".json") + "\" --threads 2 --output-dir \"" +
                       dir_.string() + "\"");
    ASSERT_EQ(r.code, 0) << stem << r.err;
    const auto rows = read_csv(dir_ / (std::string(stem) + "_results.csv"));
    EXPECT_GT(rows.size(), 2u) << stem;
    for (const auto& row : rows) EXPECT_EQ(row.size(), rows[0].size()) << stem;
    const auto summary = read_summary(dir_ / (std::string(stem) + "_summary.txt"));
    EXPECT_EQ(summary.at("run.name"), stem);
  }
}

TEST_F(CliTest, missing_subcommand_fails) {
  EXPECT_NE(cli("").code, 0);
  EXPECT_NE(cli("run").code, 0);
}
