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
 * @file simulator.hpp
 * Density-matrix and state-vector execution of gate programs with depolarizing noise,
 * readout bit flips and seeded shot sampling.
 *
 * Random numbers come from std::mt19937_64; a uniform variate is (draw >> 11) * 2^-53.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>

#include "hbdyn/common.hpp"
#include "hbdyn/gates.hpp"

namespace hbdyn {

struct DensityMatrix {
  CMatrix matrix;
  int n_qubits = 0;

  /// |0...0><0...0|.
  static DensityMatrix ground(int n_qubits);
  /// Throws NumericError when Hermiticity, trace or positivity bounds are violated.
  void validate() const;
  Vector diagonal_probabilities() const { return matrix.diagonal().real(); }
};

/// Per-gate fidelities and readout flip probability. Rz is virtual (frame update) and noiseless.
struct NoiseModel {
  double fidelity_1q = 0.995;
  double fidelity_ms = 0.97;
  double fidelity_cnot = 0.965;
  double readout_flip = 0.01;

  void validate() const;
  /// Fidelity charged to a gate; 1 for Rz, GlobalPhase, PrepareAll and MeasureAll.
  double fidelity_of(const Gate& g) const;
};

struct ShotResult {
  std::map<std::string, std::int64_t> counts;  ///< bitstring (qubit 0 first) -> count
  std::int64_t n_shots = 0;
  std::uint64_t seed = 0;

  /// Empirical probabilities indexed by basis state.
  Vector frequencies(int n_qubits) const;
};

struct RunResult {
  Vector probabilities;          ///< exact outcome probabilities before readout error
  Vector readout_probabilities;  ///< after independent readout bit flips
  std::optional<ShotResult> shots;
  DensityMatrix state;
};

/// Executes `program` from |0...0>. Without a noise model the channels are unitary and
/// readout is perfect. Sampling happens only when n_shots is given.
RunResult run_program(const GateProgram& program, const std::optional<NoiseModel>& noise,
                      std::optional<std::int64_t> n_shots, std::uint64_t seed);

/// Noiseless final state vector, global phase included.
CVector simulate_statevector(const GateProgram& program);

/// Product of per-gate fidelities.
double circuit_fidelity_estimate(const GateProgram& program, const NoiseModel& noise);

/// Applies independent bit flips with probability `flip` to every qubit.
Vector apply_readout_error(const Vector& probabilities, int n_qubits, double flip);

/// Multinomial draw by inverse CDF; probabilities must sum to 1 within 1e-9.
ShotResult sample_counts(const Vector& probabilities, std::int64_t n_shots, std::uint64_t seed);
ShotResult sample_counts(const Vector& probabilities, std::int64_t n_shots, std::mt19937_64& rng);

std::string bitstring(std::size_t index, int n_qubits);

/// `bitstring,count` rows sorted by bitstring.
void write_counts_csv(const std::filesystem::path& path, const ShotResult& shots, int n_qubits);
/// `bitstring,probability` rows with 16 significant digits.
void write_probabilities_csv(const std::filesystem::path& path, const Vector& probabilities, int n_qubits);

}  // namespace hbdyn
