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
#include "hbdyn/simulator.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "hbdyn/csv.hpp"

namespace hbdyn {

namespace {

constexpr double kTwoPowMinus53 = 1.0 / 9007199254740992.0;

void conjugate(CMatrix& rho, const LocalOperator& op, int nq) {
  apply_local(rho, op, nq);
  rho.adjointInPlace();
  apply_local(rho, op, nq);
  rho.adjointInPlace();
}

/// rho -> (1 - p) rho + p (I_S / d_S) (x) Tr_S rho for the qubit set S.
void depolarize(CMatrix& rho, const std::vector<int>& qubits, int nq, double p) {
  if (p <= 0.0) return;
  std::size_t mask = 0;
  for (int q : qubits) mask |= std::size_t{1} << (nq - 1 - q);
  std::vector<std::size_t> subsets;
  for (std::size_t s = mask;; s = (s - 1) & mask) {
    subsets.push_back(s);
    if (s == 0) break;
  }
  const double inv_d = 1.0 / static_cast<double>(subsets.size());
  const auto dim = static_cast<std::size_t>(rho.rows());
  CMatrix mixed = CMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      if ((r & mask) != (c & mask)) continue;
      cplx acc = 0.0;
      for (std::size_t s : subsets) acc += rho((r & ~mask) | s, (c & ~mask) | s);
      mixed(r, c) = acc * inv_d;
    }
  }
  rho = (1.0 - p) * rho + p * mixed;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * kTwoPowMinus53; }

}  // namespace

DensityMatrix DensityMatrix::ground(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 12) {
    throw InvalidArgument(fmt::format("density matrix qubit count {} out of range [1, 12]", n_qubits));
  }
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  DensityMatrix d{CMatrix::Zero(dim, dim), n_qubits};
  d.matrix(0, 0) = 1.0;
  return d;
}

void DensityMatrix::validate() const {
  const double herm = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12) throw NumericError(fmt::format("density matrix not Hermitian ({:.3e})", herm));
  const double tr = matrix.trace().real();
  if (std::abs(tr - 1.0) > 1e-10) throw NumericError(fmt::format("density matrix trace {:.15g}", tr));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(matrix, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw NumericError(fmt::format("density matrix eigenvalue {:.3e} < 0", es.eigenvalues().minCoeff()));
  }
}

void NoiseModel::validate() const {
  for (double v : {fidelity_1q, fidelity_ms, fidelity_cnot, readout_flip}) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument(fmt::format("noise parameter {} outside [0, 1]", v));
  }
}

double NoiseModel::fidelity_of(const Gate& g) const {
  if (std::holds_alternative<gate::Ry>(g) || std::holds_alternative<gate::R>(g)) return fidelity_1q;
  if (std::holds_alternative<gate::Cnot>(g)) return fidelity_cnot;
  if (std::holds_alternative<gate::Ms>(g)) return fidelity_ms;
  return 1.0;
}

Vector ShotResult::frequencies(int n_qubits) const {
  Vector f = Vector::Zero(Eigen::Index{1} << n_qubits);
  if (n_shots == 0) return f;
  for (const auto& [bits, count] : counts) {
    f(static_cast<Eigen::Index>(std::stoull(bits, nullptr, 2))) = static_cast<double>(count);
  }
  return f / static_cast<double>(n_shots);
}

std::string bitstring(std::size_t index, int n_qubits) {
  std::string s(static_cast<std::size_t>(n_qubits), '0');
  for (int q = 0; q < n_qubits; ++q) {
    if ((index >> (n_qubits - 1 - q)) & 1U) s[static_cast<std::size_t>(q)] = '1';
  }
  return s;
}

RunResult run_program(const GateProgram& program, const std::optional<NoiseModel>& noise,
                      std::optional<std::int64_t> n_shots, std::uint64_t seed) {
  if (noise) noise->validate();
  if (n_shots && *n_shots <= 0) throw InvalidArgument("sampling requested with a non-positive shot count");
  const int nq = program.n_qubits();
  DensityMatrix rho = DensityMatrix::ground(nq);
  for (const auto& g : program.gates()) {
    const auto op = local_operator(g);
    if (!op) continue;
    conjugate(rho.matrix, *op, nq);
    if (noise) depolarize(rho.matrix, op->qubits, nq, 1.0 - noise->fidelity_of(g));
  }
  RunResult out;
  out.probabilities = rho.diagonal_probabilities().cwiseMax(0.0);
  out.probabilities /= out.probabilities.sum();
  out.readout_probabilities =
      noise ? apply_readout_error(out.probabilities, nq, noise->readout_flip) : out.probabilities;
  if (n_shots) out.shots = sample_counts(out.readout_probabilities, *n_shots, seed);
  out.state = std::move(rho);
  return out;
}

CVector simulate_statevector(const GateProgram& program) {
  const int nq = program.n_qubits();
  CMatrix psi = CMatrix::Zero(Eigen::Index{1} << nq, 1);
  psi(0, 0) = 1.0;
  cplx phase = 1.0;
  for (const auto& g : program.gates()) {
    if (const auto op = local_operator(g)) {
      apply_local(psi, *op, nq);
    } else if (const auto* p = std::get_if<gate::GlobalPhase>(&g)) {
      phase *= std::polar(1.0, p->angle);
    }
  }
  return phase * psi.col(0);
}

double circuit_fidelity_estimate(const GateProgram& program, const NoiseModel& noise) {
  noise.validate();
  double f = 1.0;
  for (const auto& g : program.gates()) f *= noise.fidelity_of(g);
  return f;
}

Vector apply_readout_error(const Vector& probabilities, int n_qubits, double flip) {
  if (probabilities.size() != (Eigen::Index{1} << n_qubits)) {
    throw DimensionError("readout: probability vector size does not match qubit count");
  }
  if (!(flip >= 0.0 && flip <= 1.0)) throw InvalidArgument("readout flip probability outside [0, 1]");
  Vector p = probabilities;
  for (int q = 0; q < n_qubits; ++q) {
    const Eigen::Index bit = Eigen::Index{1} << (n_qubits - 1 - q);
    Vector next(p.size());
    for (Eigen::Index k = 0; k < p.size(); ++k) next(k) = (1.0 - flip) * p(k) + flip * p(k ^ bit);
    p = std::move(next);
  }
  return p;
}

ShotResult sample_counts(const Vector& probabilities, std::int64_t n_shots, std::mt19937_64& rng) {
  if (n_shots <= 0) throw InvalidArgument("n_shots must be positive");
  const auto n = static_cast<std::size_t>(probabilities.size());
  if (n == 0 || !is_power_of_two(n)) throw DimensionError("probability vector length is not a power of two");
  Vector p = probabilities;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (!std::isfinite(p(k))) throw NumericError("non-finite probability");
    if (p(k) < -1e-12) throw NumericError(fmt::format("negative probability {:.3e} at outcome {}", p(k), k));
    p(k) = std::max(p(k), 0.0);
  }
  const double total = p.sum();
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgument(fmt::format("probabilities sum to {:.12g}, expected 1", total));
  }
  std::vector<double> cumulative(n);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) cumulative[k] = (acc += p(static_cast<Eigen::Index>(k)) / total);
  std::vector<std::int64_t> tally(n, 0);
  for (std::int64_t s = 0; s < n_shots; ++s) {
    const double u = uniform01(rng);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    ++tally[static_cast<std::size_t>(it - cumulative.begin())];
  }
  const int nq = log2_exact(n);
  ShotResult r;
  r.n_shots = n_shots;
  for (std::size_t k = 0; k < n; ++k) {
    if (tally[k] > 0) r.counts.emplace(bitstring(k, nq), tally[k]);
  }
  return r;
}

ShotResult sample_counts(const Vector& probabilities, std::int64_t n_shots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ShotResult r = sample_counts(probabilities, n_shots, rng);
  r.seed = seed;
  return r;
}

void write_counts_csv(const std::filesystem::path& path, const ShotResult& shots, int n_qubits) {
  std::string out = "bitstring,count\n";
  for (const auto& [bits, count] : shots.counts) {
    if (static_cast<int>(bits.size()) != n_qubits) throw DimensionError("bitstring width mismatch");
    out += fmt::format("{},{}\n", bits, count);
  }
  csv::write_atomic(path, out);
}

void write_probabilities_csv(const std::filesystem::path& path, const Vector& probabilities, int n_qubits) {
  std::string out = "bitstring,probability\n";
  for (Eigen::Index k = 0; k < probabilities.size(); ++k) {
    out += fmt::format("{},{:.16g}\n", bitstring(static_cast<std::size_t>(k), n_qubits), probabilities(k));
  }
  csv::write_atomic(path, out);
}

}  // namespace hbdyn
