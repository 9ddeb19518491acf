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
 * @file oracles.hpp
 * Reference implementations used only by the tests. Each one avoids the code path it
 * checks: Pauli strings are built from Kronecker products, exponentials come from
 * Eigen's Pade/scaling-squaring routine, and spectra from the general (nonsymmetric) solver.
 */
#pragma once

#include <algorithm>
#include <random>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "hbdyn/gates.hpp"
#include "hbdyn/symmetry.hpp"

namespace hbdyn::oracle {

inline CMatrix pauli(char p) {
  CMatrix m(2, 2);
  switch (p) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m = CMatrix::Identity(2, 2);
  }
  return m;
}

/// Tensor product of single-qubit Paulis, qubit 0 leftmost (most significant).
inline CMatrix pauli_string(const std::string& s) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (char c : s) {
    CMatrix next = Eigen::kroneckerProduct(out, pauli(c)).eval();
    out = next;
  }
  return out;
}

inline std::string single(int n, int q, char p) {
  std::string s(static_cast<std::size_t>(n), 'I');
  s[static_cast<std::size_t>(q)] = p;
  return s;
}

inline std::string pair(int n, int i, int j, char p) {
  std::string s = single(n, i, p);
  s[static_cast<std::size_t>(j)] = p;
  return s;
}

/// sum_{i<j} J^g_ij s^g_i s^g_j + sum_i B^g_i s^g_i in the computational basis.
inline CMatrix ising_kron(const IsingParameters& p) {
  const int n = p.n_qubits;
  CMatrix h = CMatrix::Zero(1 << n, 1 << n);
  for (int i = 0; i < n; ++i) {
    h += p.bx(i) * pauli_string(single(n, i, 'X'));
    h += p.by(i) * pauli_string(single(n, i, 'Y'));
    h += p.bz(i) * pauli_string(single(n, i, 'Z'));
    for (int j = i + 1; j < n; ++j) {
      h += p.jx(i, j) * pauli_string(pair(n, i, j, 'X'));
      h += p.jy(i, j) * pauli_string(pair(n, i, j, 'Y'));
      h += p.jz(i, j) * pauli_string(pair(n, i, j, 'Z'));
    }
  }
  return h;
}

inline IsingParameters random_ising(int n, std::mt19937_64& rng, bool transverse) {
  std::normal_distribution<double> g;
  auto p = IsingParameters::zeros(n);
  for (int i = 0; i < n; ++i) {
    p.bz(i) = g(rng);
    if (transverse) {
      p.bx(i) = g(rng);
      p.by(i) = g(rng);
    }
    for (int j = i + 1; j < n; ++j) {
      p.jx(i, j) = p.jx(j, i) = g(rng);
      p.jy(i, j) = p.jy(j, i) = g(rng);
      p.jz(i, j) = p.jz(j, i) = g(rng);
    }
  }
  return p;
}

inline CMatrix expm(const CMatrix& generator) { return generator.exp(); }

/// exp(-i h t) by Pade approximation.
inline CMatrix propagator(const Matrix& h, double t) { return expm(cplx(0.0, -t) * h.cast<cplx>()); }

/// Ascending eigenvalues from the general real eigensolver (Hessenberg QR, no symmetry used).
inline Vector eigenvalues_general(const Matrix& h) {
  Eigen::EigenSolver<Matrix> es(h, false);
  std::vector<double> v;
  for (Eigen::Index k = 0; k < h.rows(); ++k) v.push_back(es.eigenvalues()(k).real());
  std::sort(v.begin(), v.end());
  return Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Haar-random unitary via QR of a complex Gaussian matrix with phase-corrected R.
inline CMatrix haar_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR();
  for (int i = 0; i < n; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}

/// Symmetric-potential Hamiltonian: Toeplitz symmetric off-diagonal part plus a
/// reflection-symmetric diagonal.
inline Matrix random_symmetric_hamiltonian(int n_points, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector toeplitz(n_points);
  for (int k = 0; k < n_points; ++k) toeplitz(k) = g(rng) / (1.0 + k);
  Vector v(n_points);
  for (int i = 0; i <= (n_points - 1) / 2; ++i) v(i) = v(n_points - 1 - i) = g(rng);
  Matrix h(n_points, n_points);
  for (int i = 0; i < n_points; ++i)
    for (int j = 0; j < n_points; ++j) h(i, j) = i == j ? v(i) + toeplitz(0) : toeplitz(std::abs(i - j));
  return h;
}

/// Gate unitary on n qubits from Pauli exponentials, independent of the library's gate tables.
inline CMatrix gate_unitary(const Gate& g, int n) {
  const CMatrix id = CMatrix::Identity(1 << n, 1 << n);
  const auto rot = [&](const CMatrix& generator, double a) { return expm(cplx(0.0, -a / 2) * generator); };
  if (const auto* x = std::get_if<gate::Rz>(&g)) return rot(pauli_string(single(n, x->q, 'Z')), x->angle);
  if (const auto* x = std::get_if<gate::Ry>(&g)) return rot(pauli_string(single(n, x->q, 'Y')), x->angle);
  if (const auto* x = std::get_if<gate::R>(&g)) {
    return rot(std::cos(x->phi) * pauli_string(single(n, x->q, 'X')) +
                   std::sin(x->phi) * pauli_string(single(n, x->q, 'Y')),
               x->theta);
  }
  if (const auto* x = std::get_if<gate::Ms>(&g)) {
    std::string s = single(n, x->q1, 'X');
    s[static_cast<std::size_t>(x->q2)] = 'X';
    return rot(pauli_string(s), x->angle);
  }
  if (const auto* x = std::get_if<gate::Cnot>(&g)) {
    const CMatrix zc = pauli_string(single(n, x->control, 'Z'));
    const CMatrix xt = pauli_string(single(n, x->target, 'X'));
    return 0.5 * (id + zc) + 0.5 * (id - zc) * xt;
  }
  if (const auto* x = std::get_if<gate::GlobalPhase>(&g)) return std::polar(1.0, x->angle) * id;
  return id;
}

inline CMatrix program_unitary(const GateProgram& p) {
  CMatrix u = CMatrix::Identity(1 << p.n_qubits(), 1 << p.n_qubits());
  for (const auto& g : p.gates()) u = (gate_unitary(g, p.n_qubits()) * u).eval();
  return u;
}

/// Largest entry of a - e^{i phi} b with phi taken from the trace overlap.
inline double phase_free_distance(const CMatrix& a, const CMatrix& b) {
  const cplx overlap = (b.adjoint() * a).trace();
  const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx(1.0);
  return (a - phase * b).cwiseAbs().maxCoeff();
}

}  // namespace hbdyn::oracle
