// Copyright 2026 The hbdyn Authors
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

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "config.hpp"
#include "hbdyn/dynamics.hpp"
#include "hbdyn/hamiltonian.hpp"
#include "hbdyn/spectrum.hpp"

namespace hbdyn::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int rc;
  std::string out;
  std::string err;
};

Result run(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"hbdyn"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : storage) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {rc, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hbdyn_test_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return path(name);
  }
  fs::path dir_;
};

TEST_F(CliTest, BuildWritesHamiltonianAndEigenvalues) {
  const auto r = run({"--out", path("o"), "build"});
  ASSERT_EQ(r.rc, kOk) << r.err;
  EXPECT_NE(r.out.find("H[0][0] = 37.7200 mHa"), std::string::npos) << r.out;
  const auto h = read_hamiltonian_csv(path("o/hamiltonian.csv"));
  EXPECT_NEAR(h.matrix()(0, 0) * 1e3, 37.72, 1e-12);
  std::istringstream eig(slurp(path("o/eigenvalues.csv")));
  std::string line;
  std::getline(eig, line);
  EXPECT_EQ(line, "index,energy_hartree,energy_cm1,relative_cm1");
  double prev = -1e300;
  int rows = 0;
  while (std::getline(eig, line)) {
    const double e = std::stod(line.substr(line.find(',') + 1));
    EXPECT_GT(e, prev);
    prev = e;
    ++rows;
  }
  EXPECT_EQ(rows, 8);
}

TEST_F(CliTest, MissingPotentialFileIsConfigError) {
  const auto r = run({"--out", path("o"), "build", "--potential", path("nope.csv")});
  EXPECT_EQ(r.rc, kConfigError);
  EXPECT_NE(r.err.find("nope.csv"), std::string::npos) << r.err;
  EXPECT_EQ(run({}).rc, kConfigError);
  EXPECT_EQ(run({"frobnicate"}).rc, kConfigError);
}

TEST_F(CliTest, ConfigErrorsCarryLineNumbers) {
  const auto bad_key = write("a.yaml", "schema_version: 1\ndynamics:\n  dt_fs: 0.5\n  stepz: 4\n");
  const auto r = run({"--config", bad_key, "build"});
  EXPECT_EQ(r.rc, kConfigError);
  EXPECT_NE(r.err.find("a.yaml:"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("stepz"), std::string::npos) << r.err;

  EXPECT_THROW(parse_config("dynamics:\n  dt_fs: 0.5\n", "b.yaml", "."), ConfigError);
  try {
    parse_config("schema_version: 1\nnoise:\n  enabled: true\n  fidelity_ms: 1.5\n", "c.yaml", ".");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("c.yaml:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_config("schema_version: 2\n", "d.yaml", "."), ConfigError);
  EXPECT_THROW(parse_config("schema_version: 1\ninitial:\n  variant: site\n", "e.yaml", "."), ConfigError);
  EXPECT_THROW(parse_config("schema_version: [1\n", "f.yaml", "."), ConfigError);
}

TEST_F(CliTest, ConfigDefaultsAndOverrides) {
  const auto cfg = parse_config(
      "schema_version: 1\ninitial:\n  variant: two_site\n  params: {i: 1, j: 6, phase: 3.14159}\n"
      "dynamics:\n  backend: circuit_ideal\n  n_steps: 64\nspectrum:\n  window: hann\n  sites: [0, 7]\n",
      "g.yaml", dir_);
  EXPECT_EQ(cfg.dynamics.backend, Backend::circuit_ideal);
  EXPECT_EQ(cfg.dynamics.n_steps, 64u);
  EXPECT_EQ(cfg.dynamics.dt_fs, 0.5);
  EXPECT_EQ(cfg.spectrum.window, Window::hann);
  EXPECT_EQ(cfg.spectrum.sites, (std::vector<std::size_t>{0, 7}));
  EXPECT_EQ(describe(cfg.initial), "two_site(1, 6, 3.14159)");
  EXPECT_EQ(cfg.shots, 1000);
  const auto spec = parse_initial("eigenstate:3");
  EXPECT_EQ(std::get<init::Eigenstate>(spec).k, 3u);
  EXPECT_THROW(parse_initial("site:-1"), ConfigError);
}

TEST_F(CliTest, SimulateIsDeterministicForFixedSeed) {
  const auto cfg = write("run.yaml",
                         "schema_version: 1\npotential:\n  symmetrize: true\ndynamics:\n  n_steps: 16\n"
                         "  backend: circuit_noisy\nshots: 200\nseed: 11\n");
  ASSERT_EQ(run({"--quiet", "--config", cfg, "--out", path("a"), "simulate"}).rc, kOk);
  ASSERT_EQ(run({"--quiet", "--config", cfg, "--out", path("b"), "simulate"}).rc, kOk);
  ASSERT_EQ(run({"--quiet", "--config", cfg, "--seed", "12", "--out", path("c"), "simulate"}).rc, kOk);
  EXPECT_EQ(slurp(path("a/timeseries.csv")), slurp(path("b/timeseries.csv")));
  EXPECT_NE(slurp(path("a/timeseries.csv")), slurp(path("c/timeseries.csv")));
  const auto ts = read_time_series_csv(path("a/timeseries.csv"));
  EXPECT_EQ(ts.site_probabilities.rows(), 16);
  EXPECT_TRUE(fs::exists(path("a/plot_dynamics.py")));
}

TEST_F(CliTest, EigenstateSeriesLeavesLadderUnderConstrained) {
  ASSERT_EQ(run({"--quiet", "--out", path("o"), "simulate", "--initial", "eigenstate:2", "--steps", "512"}).rc, kOk);
  const auto r = run({"--quiet", "--out", path("o"), "spectrum", path("o/timeseries.csv")});
  EXPECT_EQ(r.rc, kUnderConstrained) << r.err;
  EXPECT_NE(r.err.find("unconnected"), std::string::npos) << r.err;
  EXPECT_TRUE(read_peaks_csv(path("o/peaks.csv")).peaks.empty());
}

TEST_F(CliTest, MismatchedTimeGridsAreRejected) {
  ASSERT_EQ(run({"--quiet", "--out", path("o"), "simulate", "--steps", "64", "--name", "a.csv"}).rc, kOk);
  ASSERT_EQ(run({"--quiet", "--out", path("o"), "simulate", "--steps", "128", "--name", "b.csv"}).rc, kOk);
  const auto r = run({"--out", path("o"), "spectrum", path("o/a.csv"), path("o/b.csv")});
  EXPECT_EQ(r.rc, kConfigError);
  EXPECT_NE(r.err.find("b.csv"), std::string::npos) << r.err;
}

TEST_F(CliTest, SpectrumAndLadderReconstructLevels) {
  const auto cfg = write("run.yaml", "schema_version: 1\nspectrum:\n  window: hann\n");
  const std::vector<std::pair<std::string, std::string>> runs{
      {"site:0", "a.csv"}, {"site:1", "b.csv"}, {"two_site:1:6:3.141592653589793", "c.csv"}};
  for (const auto& [init, name] : runs) {
    ASSERT_EQ(run({"--quiet", "--config", cfg, "--out", path("o"), "simulate", "--initial", init, "--steps", "8192",
                   "--name", name})
                  .rc,
              kOk);
  }
  const auto r = run({"--config", cfg, "--out", path("o"), "spectrum", path("o/a.csv"), path("o/b.csv"),
                      path("o/c.csv")});
  ASSERT_EQ(r.rc, kOk) << r.err;
  const auto ladder = read_ladder_csv(path("o/ladder.csv"));
  const Vector exact = relative_levels_cm1(load_builtin_dmanh());
  ASSERT_EQ(ladder.levels_cm1.size(), 8);
  EXPECT_LT((ladder.levels_cm1 - exact).cwiseAbs().maxCoeff(), 10.0);

  const auto l = run({"--quiet", "--out", path("l"), "ladder", "--peaks", path("o/peaks.csv")});
  EXPECT_EQ(l.rc, kOk) << l.err;
  EXPECT_TRUE(fs::exists(path("l/ladder.csv")));
  EXPECT_EQ(run({"--out", path("l"), "ladder", "--peaks", path("o/none.csv")}).rc, kConfigError);
}

TEST_F(CliTest, TransformAndCompileWriteArtifacts) {
  ASSERT_EQ(run({"--quiet", "--out", path("o"), "build"}).rc, kOk);
  const auto t = run({"--out", path("o"), "transform", "--hamiltonian", path("o/hamiltonian.csv")});
  ASSERT_EQ(t.rc, kOk) << t.err;
  for (const char* f : {"transformed.csv", "upper.csv", "lower.csv", "ising.csv"}) {
    EXPECT_TRUE(fs::exists(path(std::string("o/") + f))) << f;
  }
  EXPECT_NE(t.err.find("warning"), std::string::npos);
  const auto c = run({"--out", path("o"), "compile", "--time-fs", "5", "--ms"});
  ASSERT_EQ(c.rc, kOk) << c.err;
  const auto prog = parse_text(slurp(path("o/programs/upper.ir")));
  EXPECT_EQ(prog.count_ms(), 3u);
  EXPECT_EQ(prog.count_cnot(), 0u);
  EXPECT_EQ(run({"--out", path("o"), "compile", "--time-fs", "-1"}).rc, kConfigError);
}

TEST_F(CliTest, MpsDemoReportsMarginals) {
  const auto cfg = write("run.yaml", "schema_version: 1\nmps:\n  n_substeps: 8\n  t_au: 1000\n");
  const auto r = run({"--config", cfg, "--out", path("o"), "mps-demo"});
  ASSERT_EQ(r.rc, kOk) << r.err;
  EXPECT_NE(r.out.find("worst marginal deviation"), std::string::npos);
  std::istringstream in(slurp(path("o/mps_marginals.csv")));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t_au,dim,site,p_mps,p_dense");
  double worst = 0.0;
  while (std::getline(in, line)) {
    std::vector<double> v;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
    worst = std::max(worst, std::abs(v[3] - v[4]));
  }
  EXPECT_LT(worst, 1e-6);
}

}  // namespace
}  // namespace hbdyn::cli
