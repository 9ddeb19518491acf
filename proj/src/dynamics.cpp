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
#include "hbdyn/dynamics.hpp"

#include <cmath>

#include <fmt/core.h>

#include "hbdyn/compiler.hpp"
#include "hbdyn/csv.hpp"

namespace hbdyn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_index(std::size_t i, std::size_t n, const char* what) {
  if (i >= n) throw InvalidArgument(fmt::format("{} index {} out of range for {} grid points", what, i, n));
}

struct BlockRun {
  Vector probabilities;  ///< weighted by block norm
  CVector amplitudes;    ///< ideal, weighted by block norm
};

/// Evolves one normalized block state under exp(-i block t) with a compiled program.
class BlockCircuit {
 public:
  BlockCircuit(const Matrix& block, const CVector& state)
      : block_(block), weight_(state.norm()) {
    if (weight_ > 1e-14) prep_ = state_preparation_unitary(state / weight_);
  }

  bool empty() const { return weight_ <= 1e-14; }
  Eigen::Index dim() const { return block_.rows(); }

  GateProgram program(double t_au, bool use_ms) const {
    const TwoQubitUnitary u = block_propagator(block_, t_au);
    GateProgram p = compile_unitary(TwoQubitUnitary::from_matrix(u.matrix * prep_));
    if (use_ms) p = cnot_to_ms(p);
    p.measure_all();
    return p;
  }

  BlockRun run_ideal(const GateProgram& p) const {
    BlockRun r;
    r.amplitudes = simulate_statevector(p) * weight_;
    r.probabilities = r.amplitudes.cwiseAbs2();
    return r;
  }

  double weight() const { return weight_; }

 private:
  Matrix block_;
  double weight_;
  CMatrix prep_;
};

}  // namespace

void validate_initial(const InitialStateSpec& spec, std::size_t n) {
  std::visit(overloaded{
                 [&](const init::Site& s) { check_index(s.index, n, "site"); },
                 [&](const init::TwoSite& s) {
                   check_index(s.i, n, "two_site");
                   check_index(s.j, n, "two_site");
                   if (s.i == s.j) throw InvalidArgument("two_site needs distinct sites");
                   if (!(std::abs(s.phase) <= kPi)) {
                     throw InvalidArgument(fmt::format("two_site phase {} outside [-pi, pi]", s.phase));
                   }
                 },
                 [&](const init::Eigenstate& s) { check_index(s.k, n, "eigenstate"); },
             },
             spec);
}

std::string describe(const InitialStateSpec& spec) {
  return std::visit(overloaded{
                        [](const init::Site& s) { return fmt::format("site({})", s.index); },
                        [](const init::TwoSite& s) {
                          return fmt::format("two_site({}, {}, {})", s.i, s.j, s.phase);
                        },
                        [](const init::Eigenstate& s) { return fmt::format("eigenstate({})", s.k); },
                    },
                    spec);
}

WavepacketState prepare_initial(const InitialStateSpec& spec, const NuclearHamiltonian& h) {
  const std::size_t n = h.dimension();
  validate_initial(spec, n);
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(n));
  std::visit(overloaded{
                 [&](const init::Site& s) { psi(static_cast<Eigen::Index>(s.index)) = 1.0; },
                 [&](const init::TwoSite& s) {
                   const double r = 1.0 / std::sqrt(2.0);
                   psi(static_cast<Eigen::Index>(s.i)) = r;
                   psi(static_cast<Eigen::Index>(s.j)) = std::polar(r, s.phase);
                 },
                 [&](const init::Eigenstate& s) {
                   const auto eig = exact_diagonalize(h);
                   psi = eig.eigenvectors.col(static_cast<Eigen::Index>(s.k)).cast<cplx>();
                 },
             },
             spec);
  return WavepacketState{psi};
}

CVector BlockStates::stacked() const {
  CVector v(upper.size() + lower.size());
  v << upper, lower;
  return v;
}

BlockStates to_block_states(const WavepacketState& state, const GivensReflector& reflector) {
  if (static_cast<std::size_t>(state.amplitudes.size()) != reflector.size()) {
    throw DimensionError(fmt::format("state has {} amplitudes, reflector expects {}",
                                     state.amplitudes.size(), reflector.size()));
  }
  const CVector t = reflector.matrix.cast<cplx>() * state.amplitudes;
  const auto half = static_cast<Eigen::Index>(reflector.half());
  return BlockStates{t.head(half), t.tail(t.size() - half)};
}

Vector remap_probabilities(const Vector& probs, double t, const BlockDiagonalHamiltonian& h_tilde,
                           const RemapMode& mode) {
  const Eigen::Index n = probs.size();
  if (h_tilde.transformed.rows() != n) throw DimensionError("remap: probability and Hamiltonian sizes differ");
  for (Eigen::Index k = 0; k < n; ++k) {
    if (probs(k) < -1e-12) throw NumericError(fmt::format("negative block probability {:.3e}", probs(k)));
  }
  const Vector p = probs.cwiseMax(0.0);
  const Vector phase = std::visit(
      overloaded{
          [&](const remap::FirstOrder& m) -> Vector {
            if (m.initial_transformed.size() != n) throw DimensionError("remap: initial amplitude size");
            Vector ph(n);
            for (Eigen::Index k = 0; k < n; ++k) {
              ph(k) = std::arg(m.initial_transformed(k)) - h_tilde.transformed(k, k) * t;
            }
            return ph;
          },
          [&](const remap::ExactPhase& m) -> Vector {
            if (m.transformed_amplitudes.size() != n) throw DimensionError("remap: amplitude size");
            return m.transformed_amplitudes.unaryExpr([](cplx c) { return std::arg(c); }).real();
          },
      },
      mode);
  const auto g = build_reflector(static_cast<std::size_t>(n));
  Vector site(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto j = static_cast<Eigen::Index>(g.pairing[static_cast<std::size_t>(i)]);
    const double gi = g.matrix(i, i);
    const double gj = g.matrix(j, i);
    site(i) = gi * gi * p(i) + gj * gj * p(j) +
              2.0 * gi * gj * std::sqrt(p(i) * p(j)) * std::cos(phase(i) - phase(j));
  }
  return site.cwiseMax(0.0);
}

std::string to_string(Backend b) {
  switch (b) {
    case Backend::oracle: return "oracle";
    case Backend::circuit_ideal: return "circuit_ideal";
    case Backend::circuit_noisy: return "circuit_noisy";
  }
  return "unknown";
}

std::string to_string(RemapKind r) { return r == RemapKind::first_order ? "first_order" : "exact_phase"; }

Backend backend_from_string(const std::string& s) {
  if (s == "oracle") return Backend::oracle;
  if (s == "circuit_ideal") return Backend::circuit_ideal;
  if (s == "circuit_noisy") return Backend::circuit_noisy;
  throw InvalidArgument(fmt::format("unknown backend '{}' (oracle, circuit_ideal, circuit_noisy)", s));
}

RemapKind remap_from_string(const std::string& s) {
  if (s == "first_order") return RemapKind::first_order;
  if (s == "exact_phase") return RemapKind::exact_phase;
  throw InvalidArgument(fmt::format("unknown remap mode '{}' (first_order, exact_phase)", s));
}

CMatrix state_preparation_unitary(const CVector& b) {
  if (std::abs(b.norm() - 1.0) > 1e-10) throw InvalidArgument("state preparation needs a unit vector");
  const CMatrix column = b;
  Eigen::HouseholderQR<CMatrix> qr(column);
  CMatrix q = qr.householderQ();
  const cplx r00 = qr.matrixQR()(0, 0);
  q.col(0) *= r00;
  return q;
}

TimeSeries run_dynamics(const NuclearHamiltonian& h, const InitialStateSpec& spec,
                        const DynamicsOptions& opt) {
  if (!(opt.dt_fs > 0.0) || !std::isfinite(opt.dt_fs)) throw InvalidArgument("dt_fs must be positive");
  if (opt.n_steps < 1) throw InvalidArgument("n_steps must be >= 1");
  if (opt.backend == Backend::circuit_noisy) {
    opt.noise.validate();
    if (opt.shots <= 0) throw InvalidArgument("circuit_noisy backend needs a positive shot count");
  }
  const auto n = static_cast<Eigen::Index>(h.dimension());
  const auto steps = static_cast<Eigen::Index>(opt.n_steps);
  const WavepacketState psi0 = prepare_initial(spec, h);

  TimeSeries ts;
  ts.backend = opt.backend;
  ts.remap = opt.remap;
  ts.seed = opt.seed;
  ts.shots = opt.backend == Backend::circuit_noisy ? opt.shots : 0;
  ts.times_fs.resize(steps);
  ts.site_probabilities.resize(steps, n);
  for (Eigen::Index k = 0; k < steps; ++k) ts.times_fs(k) = static_cast<double>(k) * opt.dt_fs;

  if (opt.backend == Backend::oracle) {
    const auto eig = exact_diagonalize(h);
    const CMatrix v = eig.eigenvectors.cast<cplx>();
    const CVector c0 = v.adjoint() * psi0.amplitudes;
    if (opt.keep_amplitudes) ts.amplitudes.emplace().reserve(opt.n_steps);
    for (Eigen::Index k = 0; k < steps; ++k) {
      const double t = units::fs_to_au(ts.times_fs(k));
      CVector ct(n);
      for (Eigen::Index j = 0; j < n; ++j) ct(j) = c0(j) * std::polar(1.0, -eig.eigenvalues(j) * t);
      const CVector psi = v * ct;
      ts.site_probabilities.row(k) = psi.cwiseAbs2().transpose();
      if (ts.amplitudes) ts.amplitudes->push_back(psi);
    }
    return ts;
  }

  if (opt.keep_amplitudes) throw InvalidArgument("amplitude output is only available from the oracle backend");
  if (n != 4 && n != 8) {
    throw DimensionError(fmt::format("circuit backends need a 4- or 8-point grid, got {}", n));
  }
  const auto h_tilde = transform(h);
  const auto reflector = build_reflector(h.dimension());
  const BlockStates blocks0 = to_block_states(psi0, reflector);
  const CVector initial_transformed = blocks0.stacked();
  const BlockCircuit upper(h_tilde.upper, blocks0.upper);
  const BlockCircuit lower(h_tilde.lower, blocks0.lower);
  const Eigen::Index half = n / 2;
  const int block_qubits = log2_exact(static_cast<std::size_t>(half));

  double min_fidelity = 1.0;
  for (Eigen::Index k = 0; k < steps; ++k) {
    const double t = units::fs_to_au(ts.times_fs(k));
    std::mt19937_64 rng(opt.seed + static_cast<std::uint64_t>(k));
    CVector amps = CVector::Zero(n);
    Vector probs = Vector::Zero(n);
    double step_fidelity = 1.0;
    Eigen::Index offset = 0;
    for (const BlockCircuit* bc : {&upper, &lower}) {
      if (!bc->empty()) {
        const GateProgram prog = bc->program(t, opt.use_ms);
        const BlockRun ideal = bc->run_ideal(prog);
        amps.segment(offset, half) = ideal.amplitudes;
        if (opt.backend == Backend::circuit_noisy) {
          const RunResult noisy = run_program(prog, opt.noise, std::nullopt, 0);
          const ShotResult shots = sample_counts(noisy.readout_probabilities, opt.shots, rng);
          probs.segment(offset, half) = shots.frequencies(block_qubits) * (bc->weight() * bc->weight());
          step_fidelity *= circuit_fidelity_estimate(prog, opt.noise);
        } else {
          probs.segment(offset, half) = ideal.probabilities;
        }
      }
      offset += half;
    }
    min_fidelity = std::min(min_fidelity, step_fidelity);
    const RemapMode mode = opt.remap == RemapKind::first_order
                               ? RemapMode{remap::FirstOrder{initial_transformed}}
                               : RemapMode{remap::ExactPhase{amps}};
    ts.site_probabilities.row(k) = remap_probabilities(probs, t, h_tilde, mode).transpose();
  }
  ts.fidelity_estimate = min_fidelity;
  return ts;
}

BlockPrograms compile_block_programs(const NuclearHamiltonian& h, const InitialStateSpec& spec, double t_au,
                                     bool use_ms) {
  const auto h_tilde = transform(h);
  const BlockStates b = to_block_states(prepare_initial(spec, h), build_reflector(h.dimension()));
  const BlockCircuit upper(h_tilde.upper, b.upper);
  const BlockCircuit lower(h_tilde.lower, b.lower);
  BlockPrograms out;
  if (!upper.empty()) out.upper = upper.program(t_au, use_ms);
  if (!lower.empty()) out.lower = lower.program(t_au, use_ms);
  return out;
}

void write_time_series_csv(const std::filesystem::path& path, const TimeSeries& series) {
  const Eigen::Index n = series.site_probabilities.cols();
  std::string out = "t_fs";
  for (Eigen::Index i = 0; i < n; ++i) out += fmt::format(",p_site_{}", i);
  out += ",row_sum\n";
  for (Eigen::Index k = 0; k < series.times_fs.size(); ++k) {
    out += fmt::format("{:.12g}", series.times_fs(k));
    for (Eigen::Index i = 0; i < n; ++i) out += fmt::format(",{:.12g}", series.site_probabilities(k, i));
    out += fmt::format(",{:.12g}\n", series.site_probabilities.row(k).sum());
  }
  csv::write_atomic(path, out);
}

TimeSeries read_time_series_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  const auto name = path.string();
  const auto& hdr = table.header;
  if (hdr.size() < 3 || hdr.front() != "t_fs" || hdr.back() != "row_sum") {
    throw InvalidArgument(fmt::format("{}:1: expected header t_fs,p_site_0,...,row_sum", name));
  }
  const auto n_sites = static_cast<Eigen::Index>(hdr.size() - 2);
  for (Eigen::Index i = 0; i < n_sites; ++i) {
    if (hdr[static_cast<std::size_t>(i + 1)] != fmt::format("p_site_{}", i)) {
      throw InvalidArgument(fmt::format("{}:1: column {} should be p_site_{}", name, i + 1, i));
    }
  }
  TimeSeries ts;
  const auto rows = static_cast<Eigen::Index>(table.rows.size());
  if (rows == 0) throw InvalidArgument(fmt::format("{}: no data rows", name));
  ts.times_fs.resize(rows);
  ts.site_probabilities.resize(rows, n_sites);
  for (Eigen::Index k = 0; k < rows; ++k) {
    const auto& row = table.rows[static_cast<std::size_t>(k)];
    const auto line = table.line_numbers[static_cast<std::size_t>(k)];
    if (row.size() != hdr.size()) {
      throw InvalidArgument(fmt::format("{}:{}: expected {} fields, got {}", name, line, hdr.size(), row.size()));
    }
    ts.times_fs(k) = csv::to_double(row[0], name, line);
    for (Eigen::Index i = 0; i < n_sites; ++i) {
      ts.site_probabilities(k, i) = csv::to_double(row[static_cast<std::size_t>(i + 1)], name, line);
    }
  }
  return ts;
}

}  // namespace hbdyn
