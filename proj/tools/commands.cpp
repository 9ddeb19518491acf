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
#include "commands.hpp"

#include <fmt/core.h>
#include <fmt/ostream.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "hbdyn/compiler.hpp"
#include "hbdyn/csv.hpp"
#include "hbdyn/mps.hpp"
#include "hbdyn/symmetry.hpp"

namespace hbdyn::cli {
namespace {

namespace fs = std::filesystem;
using namespace units;

constexpr double kDefaultLadderDeviationCm1 = 10.0;

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool quiet = false;
};

class Session {
 public:
  Session(const Globals& g, std::ostream& out, std::ostream& err) : out_(out), err_(err), quiet_(g.quiet) {
    if (!g.config_path.empty()) cfg_ = load_config(g.config_path);
    if (g.seed) cfg_.seed = *g.seed;
    if (g.out_dir) cfg_.output_dir = *g.out_dir;
  }

  RunConfig& cfg() { return cfg_; }
  fs::path out_path(const std::string& name) const { return cfg_.output_dir / name; }

  template <typename... Args>
  void info(fmt::format_string<Args...> f, Args&&... args) {
    if (!quiet_) out_ << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }
  template <typename... Args>
  void warn(fmt::format_string<Args...> f, Args&&... args) {
    err_ << "warning: " << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }

  NuclearHamiltonian hamiltonian(const std::string& override_path) const {
    if (!override_path.empty()) {
      if (!fs::exists(override_path)) throw ConfigError(fmt::format("hamiltonian file '{}' does not exist", override_path));
      auto h = read_hamiltonian_csv(override_path);
      return cfg_.potential.symmetrize ? reflection_symmetrize(h) : h;
    }
    return build_from_config(cfg_);
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
  bool quiet_;
  RunConfig cfg_;
};

void write_matrix_csv(const fs::path& path, const Matrix& m) {
  std::string text;
  for (Eigen::Index j = 0; j < m.cols(); ++j) text += fmt::format("{}c_{}", j ? "," : "", j);
  text += '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) text += fmt::format("{}{:.17g}", j ? "," : "", m(i, j));
    text += '\n';
  }
  csv::write_atomic(path, text);
}

void write_eigenvalues_csv(const fs::path& path, const Vector& e) {
  std::string text = "index,energy_hartree,energy_cm1,relative_cm1\n";
  for (Eigen::Index k = 0; k < e.size(); ++k) {
    text += fmt::format("{},{:.17g},{:.17g},{:.17g}\n", k, e(k), hartree_to_wavenumber(e(k)),
                        hartree_to_wavenumber(e(k) - e(0)));
  }
  csv::write_atomic(path, text);
}

void write_ising_csv(const fs::path& path, const IsingFit& fit) {
  const auto& p = fit.params;
  std::string text = "name,value_hartree\n";
  for (int i = 0; i < p.n_qubits; ++i) text += fmt::format("bz_{},{:.17g}\n", i, p.bz(i));
  for (int i = 0; i < p.n_qubits; ++i) {
    for (int j = i + 1; j < p.n_qubits; ++j) {
      text += fmt::format("jz_{}_{},{:.17g}\n", i, j, p.jz(i, j));
      text += fmt::format("jx_{}_{},{:.17g}\n", i, j, p.jx(i, j));
      text += fmt::format("jy_{}_{},{:.17g}\n", i, j, p.jy(i, j));
    }
  }
  text += fmt::format("residual,{:.17g}\n", fit.residual);
  csv::write_atomic(path, text);
}

constexpr const char* kPlotDynamics = R"PY(#!/usr/bin/env python3
"""Renders site-probability time series written by `hbdyn simulate`."""
import csv
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    header, body = rows[0], rows[1:]
    sites = [i for i, name in enumerate(header) if name.startswith("p_site_")]
    t = [float(r[0]) for r in body]
    return t, {header[i]: [float(r[i]) for r in body] for i in sites}


def main(argv):
    here = pathlib.Path(__file__).resolve().parent
    files = [pathlib.Path(a) for a in argv] or sorted(here.glob("*timeseries*.csv"))
    for path in files:
        t, cols = load(path)
        fig, ax = plt.subplots(figsize=(7, 3.5))
        for name, p in cols.items():
            ax.plot(t, p, lw=0.8, label=name.replace("p_site_", "site "))
        ax.set_xlim(0, min(t[-1], 200.0))
        ax.set_xlabel("time (fs)")
        ax.set_ylabel("probability")
        ax.legend(ncol=4, fontsize=7)
        fig.tight_layout()
        fig.savefig(path.with_suffix(".png"), dpi=150)
        plt.close(fig)


if __name__ == "__main__":
    main(sys.argv[1:])
)PY";

constexpr const char* kPlotSpectrum = R"PY(#!/usr/bin/env python3
"""Renders spectrum.csv, peaks.csv and ladder.csv written by `hbdyn spectrum`."""
import csv
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = pathlib.Path(__file__).resolve().parent


def table(name):
    path = HERE / name
    if not path.exists():
        return []
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def main():
    spec = table("spectrum.csv")
    peaks = table("peaks.csv")
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.plot([float(r["freq_cm1"]) for r in spec], [float(r["amplitude"]) for r in spec], lw=0.7)
    for p in peaks:
        ax.axvline(float(p["freq_cm1"]), color="tab:red", lw=0.4, alpha=0.6)
    ax.set_xlim(0, 12000)
    ax.set_xlabel("wavenumber (cm$^{-1}$)")
    ax.set_ylabel("amplitude")
    fig.tight_layout()
    fig.savefig(HERE / "spectrum.png", dpi=150)
    plt.close(fig)

    ladder = table("ladder.csv")
    if ladder:
        fig, ax = plt.subplots(figsize=(3, 5))
        for r in ladder:
            e = float(r["energy_cm1"])
            ax.hlines(e, 0, 1, color="k")
            ax.text(1.05, e, r["level_index"], va="center", fontsize=7)
        ax.set_xticks([])
        ax.set_ylabel("relative energy (cm$^{-1}$)")
        fig.tight_layout()
        fig.savefig(HERE / "ladder.png", dpi=150)
        plt.close(fig)


if __name__ == "__main__":
    main()
)PY";

Backend effective_backend(const RunConfig& cfg) {
  if (cfg.dynamics.backend == Backend::circuit_ideal && cfg.noise.enabled) return Backend::circuit_noisy;
  return cfg.dynamics.backend;
}

void write_program_pair(const fs::path& dir, const std::string& stem, const BlockPrograms& p) {
  if (p.upper) csv::write_atomic(dir / (stem + "upper.ir"), emit_text(*p.upper));
  if (p.lower) csv::write_atomic(dir / (stem + "lower.ir"), emit_text(*p.lower));
}

// --- subcommands ------------------------------------------------------------------------

int cmd_build(Session& s, const std::string& potential) {
  if (!potential.empty()) s.cfg().potential.source = potential;
  if (s.cfg().potential.source != kBuiltinPotential) {
    const auto path = s.cfg().base_dir / s.cfg().potential.source;
    if (!fs::exists(path)) throw ConfigError(fmt::format("potential file '{}' does not exist", path.string()));
  }
  const auto h = build_from_config(s.cfg());
  const auto eig = exact_diagonalize(h);
  write_hamiltonian_csv(s.out_path("hamiltonian.csv"), h);
  write_eigenvalues_csv(s.out_path("eigenvalues.csv"), eig.eigenvalues);
  s.info("built {}-point Hamiltonian, H[0][0] = {:.4f} mHa", h.dimension(), 1e3 * h.matrix()(0, 0));
  s.info("lowest splitting {:.3f} cm^-1", hartree_to_wavenumber(eig.eigenvalues(1) - eig.eigenvalues(0)));
  return kOk;
}

int cmd_transform(Session& s, const std::string& ham) {
  const auto h = s.hamiltonian(ham);
  const auto t = transform(h);
  write_matrix_csv(s.out_path("transformed.csv"), t.transformed);
  write_matrix_csv(s.out_path("upper.csv"), t.upper);
  write_matrix_csv(s.out_path("lower.csv"), t.lower);
  const auto fit = fit_ising_params(t);
  write_ising_csv(s.out_path("ising.csv"), fit);
  s.info("off-block residual {:.3e} mHa", 1e3 * t.off_block_residual);
  s.info("ising fit: {} qubits, {} handles, residual {:.3e} Ha", fit.params.n_qubits,
         handle_count(fit.params.n_qubits), fit.residual);
  if (t.approximate()) s.warn("off-block residual exceeds {:.0e} Ha; the two blocks only approximate H", kOffBlockWarnHartree);
  return kOk;
}

int cmd_compile(Session& s, const std::string& ham, std::optional<double> time_fs, const std::string& initial,
                bool ms) {
  auto& cfg = s.cfg();
  if (!initial.empty()) cfg.initial = parse_initial(initial);
  const auto h = s.hamiltonian(ham);
  const double t_fs = time_fs.value_or(cfg.dynamics.dt_fs);
  if (!std::isfinite(t_fs) || t_fs < 0.0) throw ConfigError(fmt::format("--time-fs must be finite and >= 0, got {}", t_fs));
  const auto programs = compile_block_programs(h, cfg.initial, fs_to_au(t_fs), ms || cfg.dynamics.use_ms);
  write_program_pair(cfg.output_dir / "programs", "", programs);
  for (const std::optional<GateProgram>* p : {&programs.upper, &programs.lower}) {
    if (!*p) continue;
    s.info("{} block: {} cnot, {} ms, {} rotations, fidelity estimate {:.4f}", p == &programs.upper ? "upper" : "lower",
           (*p)->count_cnot(), (*p)->count_ms(), (*p)->count_rotations(),
           circuit_fidelity_estimate(**p, cfg.noise.model));
  }
  return kOk;
}

int cmd_simulate(Session& s, const std::string& ham, const std::string& backend, const std::string& initial,
                 std::optional<std::size_t> steps, const std::string& name) {
  auto& cfg = s.cfg();
  if (!backend.empty()) cfg.dynamics.backend = backend_from_string(backend);
  if (!initial.empty()) cfg.initial = parse_initial(initial);
  if (steps) cfg.dynamics.n_steps = *steps;
  const auto h = s.hamiltonian(ham);

  const auto eig = exact_diagonalize(h);
  const double span_cm1 = hartree_to_wavenumber(eig.eigenvalues(eig.eigenvalues.size() - 1) - eig.eigenvalues(0));
  const double nyquist_cm1 = cycles_per_fs_to_wavenumber(0.5 / cfg.dynamics.dt_fs);
  if (span_cm1 > nyquist_cm1) {
    s.warn("dt = {} fs resolves up to {:.1f} cm^-1 but the spectral range is {:.1f} cm^-1; use dt <= {:.4f} fs",
           cfg.dynamics.dt_fs, nyquist_cm1, span_cm1, cfg.dynamics.dt_fs * nyquist_cm1 / span_cm1);
  }

  DynamicsOptions opt;
  opt.dt_fs = cfg.dynamics.dt_fs;
  opt.n_steps = cfg.dynamics.n_steps;
  opt.backend = effective_backend(cfg);
  opt.remap = cfg.dynamics.remap;
  opt.noise = cfg.noise.model;
  opt.shots = cfg.shots;
  opt.seed = cfg.seed;
  opt.use_ms = cfg.dynamics.use_ms;
  if (opt.backend != Backend::oracle && transform(h).approximate()) {
    s.warn("Hamiltonian is not reflection symmetric; circuit backends evolve the two blocks only "
           "(set potential.symmetrize: true for an exact split)");
  }

  const auto series = run_dynamics(h, cfg.initial, opt);
  const auto path = s.out_path(name);
  write_time_series_csv(path, series);
  csv::write_atomic(s.out_path("plot_dynamics.py"), kPlotDynamics);

  if (cfg.dynamics.emit_programs && opt.backend != Backend::oracle) {
    const auto dir = cfg.output_dir / "programs";
    for (std::size_t k = 0; k < opt.n_steps; ++k) {
      const double t_au = fs_to_au(static_cast<double>(k) * opt.dt_fs);
      write_program_pair(dir, fmt::format("step_{:06d}_", k), compile_block_programs(h, cfg.initial, t_au, opt.use_ms));
    }
  }
  s.info("{}: {} steps of {} fs, backend {}, initial {}", path.string(), opt.n_steps, opt.dt_fs,
         to_string(opt.backend), describe(cfg.initial));
  if (opt.backend == Backend::circuit_noisy) s.info("worst per-step fidelity estimate {:.4f}", series.fidelity_estimate);
  return kOk;
}

void require_same_grid(const TimeSeries& a, const TimeSeries& b, const std::string& name) {
  bool same = a.times_fs.size() == b.times_fs.size();
  for (Eigen::Index k = 0; same && k < a.times_fs.size(); ++k) {
    same = std::abs(a.times_fs(k) - b.times_fs(k)) <= 1e-9 * std::max(1.0, std::abs(a.times_fs(k)));
  }
  if (!same) throw ConfigError(fmt::format("time grid of '{}' differs from the first series", name));
}

int finish_ladder(Session& s, const std::vector<PeakSet>& peak_sets, const NuclearHamiltonian& h, double max_dev) {
  const Vector predicted = relative_levels_cm1(h);
  EnergyLadder ladder;
  try {
    ladder = reconstruct_ladder(peak_sets, predicted, max_dev);
  } catch (const UnderConstrainedError& e) {
    s.warn("{}", e.what());
    return kUnderConstrained;
  }
  write_ladder_csv(s.out_path("ladder.csv"), ladder);
  const double rms = std::sqrt((ladder.levels_cm1 - predicted).squaredNorm() / static_cast<double>(predicted.size()));
  s.info("ladder: {} levels from {} splittings, fit residual {:.3f} cm^-1, RMS vs exact {:.3f} cm^-1",
         ladder.levels_cm1.size(), ladder.assignments.size(), ladder.residual_rms_cm1, rms);
  return kOk;
}

int cmd_spectrum(Session& s, const std::vector<std::string>& inputs, const std::string& ham,
                 const std::string& window) {
  auto& cfg = s.cfg();
  if (!window.empty()) cfg.spectrum.window = window_from_string(window);
  std::vector<TimeSeries> series;
  for (const auto& in : inputs) {
    if (!fs::exists(in)) throw ConfigError(fmt::format("series file '{}' does not exist", in));
    series.push_back(read_time_series_csv(in));
    if (series.size() > 1) require_same_grid(series.front(), series.back(), in);
  }
  std::vector<Spectrum> spectra;
  for (std::size_t k = 0; k < series.size(); ++k) {
    spectra.push_back(fourier_spectrum(series[k], cfg.spectrum.sites, cfg.spectrum.window, inputs[k]));
  }
  const Spectrum combined = spectra.size() == 1 ? spectra.front() : combine_spectra(spectra);
  const PeakSet peaks = detect_peaks(combined, cfg.spectrum.threshold_factor);
  write_spectrum_csv(s.out_path("spectrum.csv"), combined);
  write_peaks_csv(s.out_path("peaks.csv"), peaks);
  csv::write_atomic(s.out_path("plot_spectrum.py"), kPlotSpectrum);
  s.info("spectrum: {} inputs, bin {:.4f} cm^-1, {} peaks", inputs.size(), combined.bin_width(), peaks.peaks.size());
  return finish_ladder(s, {peaks}, s.hamiltonian(ham), cfg.spectrum.max_deviation_cm1);
}

int cmd_ladder(Session& s, const std::vector<std::string>& inputs, const std::string& ham,
               std::optional<double> max_dev) {
  std::vector<PeakSet> sets;
  for (const auto& in : inputs) {
    if (!fs::exists(in)) throw ConfigError(fmt::format("peaks file '{}' does not exist", in));
    sets.push_back(read_peaks_csv(in));
  }
  double dev = max_dev.value_or(s.cfg().spectrum.max_deviation_cm1);
  if (dev <= 0.0) dev = kDefaultLadderDeviationCm1;
  return finish_ladder(s, sets, s.hamiltonian(ham), dev);
}

int cmd_mps_demo(Session& s) {
  const auto& m = s.cfg().mps;
  const Model2d model = double_well_harmonic_model(m.points);
  const std::vector<int> dims(model.grids.size(), m.points);
  const TruncationPolicy policy{m.tol, m.chi_max};
  const auto start = mps_from_dense(model.initial, dims, policy).value;
  const CMatrix h = model.hamiltonian.cast<cplx>();
  const auto traj = propagate_nd(h, start, m.t_au, m.n_substeps, policy);

  Eigen::SelfAdjointEigenSolver<Matrix> es(model.hamiltonian);
  std::string text = "t_au,dim,site,p_mps,p_dense\n";
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const double t = m.t_au * static_cast<double>(k) / m.n_substeps;
    const CVector phases = (es.eigenvalues().cast<cplx>() * cplx(0.0, -t)).array().exp().matrix();
    const CVector psi = es.eigenvectors().cast<cplx>() *
                        phases.cwiseProduct(es.eigenvectors().transpose().cast<cplx>() * model.initial);
    const auto pm = marginals(traj.states[k]);
    const auto pd = dense_marginals(psi, dims);
    for (std::size_t d = 0; d < pm.size(); ++d) {
      for (Eigen::Index i = 0; i < pm[d].size(); ++i) {
        worst = std::max(worst, std::abs(pm[d](i) - pd[d](i)));
        text += fmt::format("{:.17g},{},{},{:.17g},{:.17g}\n", t, d, i, pm[d](i), pd[d](i));
      }
    }
  }
  csv::write_atomic(s.out_path("mps_marginals.csv"), text);
  csv::write_atomic(s.out_path("mps_state.txt"), serialize(traj.states.back()));
  const auto kin = kinetic_mpo(model.grids, model.specs);
  s.info("mps: {} substeps to t = {} au, max bond {}, propagator MPO bond {}", m.n_substeps, m.t_au,
         traj.states.back().max_bond(), traj.mpo_max_bond);
  s.info("kinetic MPO parameters {}, worst marginal deviation {:.3e}", kin.parameter_count(), worst);
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hbdyn: nuclear quantum dynamics compiled to qubit gate programs"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "YAML run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "RNG seed (overrides the configuration)");
  app.add_option("--out", g.out_dir, "output directory (overrides the configuration)");
  app.add_flag("--quiet", g.quiet, "suppress progress output");
  app.fallthrough();

  std::string potential, ham, backend, initial, window, name = "timeseries.csv";
  std::optional<double> time_fs, max_dev;
  std::optional<std::size_t> steps;
  std::vector<std::string> inputs;
  bool ms = false;

  auto* build = app.add_subcommand("build", "assemble the Hamiltonian and its eigenvalues");
  build->add_option("--potential", potential, "builtin_dmanh or a potential CSV");

  auto* trans = app.add_subcommand("transform", "block-diagonalize and fit Ising parameters");
  trans->add_option("--hamiltonian", ham, "Hamiltonian CSV written by build");

  auto* comp = app.add_subcommand("compile", "compile block propagators into gate programs");
  comp->add_option("--hamiltonian", ham, "Hamiltonian CSV written by build");
  comp->add_option("--time-fs", time_fs, "evolution time in fs (default: dynamics.dt_fs)");
  comp->add_option("--initial", initial, "site:i | two_site:i:j:phase | eigenstate:k");
  comp->add_flag("--ms", ms, "lower CNOTs to MS gates");

  auto* sim = app.add_subcommand("simulate", "run a site-probability time series");
  sim->add_option("--hamiltonian", ham, "Hamiltonian CSV written by build");
  sim->add_option("--backend", backend, "oracle | circuit_ideal | circuit_noisy");
  sim->add_option("--initial", initial, "site:i | two_site:i:j:phase | eigenstate:k");
  sim->add_option("--steps", steps, "number of timesteps");
  sim->add_option("--name", name, "output file name inside the output directory");

  auto* spec = app.add_subcommand("spectrum", "Fourier spectra, peaks and energy ladder");
  spec->add_option("series", inputs, "time series CSV files")->required();
  spec->add_option("--hamiltonian", ham, "Hamiltonian CSV used for predicted levels");
  spec->add_option("--window", window, "rectangular | hann");

  auto* lad = app.add_subcommand("ladder", "energy ladder from peak files");
  lad->add_option("--peaks", inputs, "peaks CSV files")->required();
  lad->add_option("--hamiltonian", ham, "Hamiltonian CSV used for predicted levels");
  lad->add_option("--max-deviation", max_dev, "assignment tolerance in cm^-1");

  auto* mps = app.add_subcommand("mps-demo", "tensor-network propagation of the two-dimensional model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    Session s(g, out, err);
    if (*build) return cmd_build(s, potential);
    if (*trans) return cmd_transform(s, ham);
    if (*comp) return cmd_compile(s, ham, time_fs, initial, ms);
    if (*sim) return cmd_simulate(s, ham, backend, initial, steps, name);
    if (*spec) return cmd_spectrum(s, inputs, ham, window);
    if (*lad) return cmd_ladder(s, inputs, ham, max_dev);
    if (*mps) return cmd_mps_demo(s);
    return kFailure;
  } catch (const UnderConstrainedError& e) {
    err << "error: " << e.what() << '\n';
    return kUnderConstrained;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace hbdyn::cli
