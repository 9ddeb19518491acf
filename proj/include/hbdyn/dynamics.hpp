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
/**
 * @file dynamics.hpp
 * Initial wavepackets, time propagation backends and block-to-site probability remapping.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hbdyn/hamiltonian.hpp"
#include "hbdyn/simulator.hpp"
#include "hbdyn/symmetry.hpp"

namespace hbdyn {

struct WavepacketState {
  CVector amplitudes;

  double norm() const { return amplitudes.norm(); }
};

namespace init {
struct Site {
  std::size_t index = 0;
};
/// (|i> + exp(i phase) |j>) / sqrt2.
struct TwoSite {
  std::size_t i = 0;
  std::size_t j = 0;
  double phase = 0.0;
};
/// k-th eigenvector of the Hamiltonian, ascending energy.
struct Eigenstate {
  std::size_t k = 0;
};
}  // namespace init

using InitialStateSpec = std::variant<init::Site, init::TwoSite, init::Eigenstate>;

void validate_initial(const InitialStateSpec& spec, std::size_t n_points);
std::string describe(const InitialStateSpec& spec);

WavepacketState prepare_initial(const InitialStateSpec& spec, const NuclearHamiltonian& h);

struct BlockStates {
  CVector upper;
  CVector lower;

  /// Upper then lower, i.e. G * state.
  CVector stacked() const;
};

BlockStates to_block_states(const WavepacketState& state, const GivensReflector& reflector);

/// Phase source for the cross term of the remap.
namespace remap {
/// phi_n(t) = arg(c_n(0)) - H~_nn t, from the initial transformed amplitudes.
struct FirstOrder {
  CVector initial_transformed;
};
/// Phases of the actual transformed amplitudes at time t.
struct ExactPhase {
  CVector transformed_amplitudes;
};
}  // namespace remap

using RemapMode = std::variant<remap::FirstOrder, remap::ExactPhase>;

/// Site probabilities from transformed-basis probabilities (upper block then lower, each
/// weighted by its block norm) and the chosen phase source.
Vector remap_probabilities(const Vector& transformed_probabilities, double t,
                           const BlockDiagonalHamiltonian& h_tilde, const RemapMode& mode);

enum class Backend { oracle, circuit_ideal, circuit_noisy };
enum class RemapKind { first_order, exact_phase };

std::string to_string(Backend b);
std::string to_string(RemapKind r);
Backend backend_from_string(const std::string& s);
RemapKind remap_from_string(const std::string& s);

struct DynamicsOptions {
  double dt_fs = 0.5;
  std::size_t n_steps = 32768;
  Backend backend = Backend::oracle;
  RemapKind remap = RemapKind::exact_phase;
  NoiseModel noise{};
  std::int64_t shots = 1000;
  std::uint64_t seed = 0;
  /// Lower CNOTs to MS gates before execution.
  bool use_ms = false;
  /// Keep the full wavefunction per timestep (oracle backend only).
  bool keep_amplitudes = false;
};

struct TimeSeries {
  Vector times_fs;
  Matrix site_probabilities;  ///< [timestep][site]
  Backend backend = Backend::oracle;
  RemapKind remap = RemapKind::exact_phase;
  std::uint64_t seed = 0;
  std::int64_t shots = 0;
  /// Smallest per-timestep product of gate fidelities (circuit_noisy only, else 1).
  double fidelity_estimate = 1.0;
  /// Grid amplitudes per timestep when requested from the oracle backend.
  std::optional<std::vector<CVector>> amplitudes;
};

/// Rows at t_k = k dt for k = 0 .. n_steps-1. Circuit backends evolve the two reflection
/// blocks independently and need 2- or 4-dimensional blocks (4- or 8-point grids).
TimeSeries run_dynamics(const NuclearHamiltonian& h, const InitialStateSpec& spec,
                        const DynamicsOptions& options);

/// Per-block programs preparing the block state and evolving it to t_au. A block with
/// no weight in the initial state has no program.
struct BlockPrograms {
  std::optional<GateProgram> upper;
  std::optional<GateProgram> lower;
};
BlockPrograms compile_block_programs(const NuclearHamiltonian& h, const InitialStateSpec& spec, double t_au,
                                     bool use_ms = false);

/// Unitary whose first column is the unit vector `b`.
CMatrix state_preparation_unitary(const CVector& b);

/// `t_fs,p_site_0,...,p_site_{n-1},row_sum` with 12 significant digits.
void write_time_series_csv(const std::filesystem::path& path, const TimeSeries& series);
TimeSeries read_time_series_csv(const std::filesystem::path& path);

}  // namespace hbdyn
