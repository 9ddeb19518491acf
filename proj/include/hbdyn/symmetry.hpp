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
 * @file symmetry.hpp
 * Reflection (Givens) basis change that block-diagonalizes reflection
 * symmetric grid Hamiltonians, and the Ising-model parameterization of the
 * resulting blocks.
 */
#pragma once

#include <vector>

#include "hbdyn/common.hpp"
#include "hbdyn/hamiltonian.hpp"

namespace hbdyn {

/// Orthogonal map pairing grid points i and n-i:
/// rows i < (n+1)/2 are (e_i + e_{n-i})/sqrt2, the rest (e_i - e_{n-i})/sqrt2.
struct GivensReflector {
  Matrix matrix;
  std::vector<std::size_t> pairing;  ///< pairing[i] = n - i

  std::size_t size() const { return pairing.size(); }
  std::size_t half() const { return pairing.size() / 2; }
};

GivensReflector build_reflector(std::size_t n_points);

/// Off-block residual above this is reported as approximate (two-block evolution is inexact).
inline constexpr double kOffBlockWarnHartree = 1e-6;

struct BlockDiagonalHamiltonian {
  Matrix upper;        ///< symmetric (even) sector, Hartree
  Matrix lower;        ///< antisymmetric (odd) sector, Hartree
  Matrix transformed;  ///< full G H G^T
  double off_block_residual = 0.0;

  bool approximate() const { return off_block_residual > kOffBlockWarnHartree; }
};

/// Closed-form G H G^T for a Hamiltonian with Toeplitz off-diagonal part.
/// Throws NumericError when the off-diagonal part is not Toeplitz.
Matrix closed_form_transform(const Matrix& h);

/// Computes G H G^T, cross-checks it against closed_form_transform (1e-10 Ha), and splits it.
BlockDiagonalHamiltonian transform(const NuclearHamiltonian& h);

/// (H + J H J) / 2 with J the site reversal i -> n-i. Its transform has zero off-block part.
NuclearHamiltonian reflection_symmetrize(const NuclearHamiltonian& h);

/// Computational basis indices ordered even-popcount first, then odd; each group ascending.
std::vector<std::size_t> parity_permutation(int n_qubits);

/// Couplings and fields of sum_{i<j} J^g_ij s^g_i s^g_j + sum_i B^g_i s^g_i, Hartree.
/// Qubit 0 is the most significant bit of a basis index.
struct IsingParameters {
  int n_qubits = 0;
  Matrix jx, jy, jz;  ///< symmetric, zero diagonal
  Vector bx, by, bz;

  static IsingParameters zeros(int n_qubits);
  void validate() const;
  bool transverse_fields_zero() const { return bx.isZero(0.0) && by.isZero(0.0); }
};

/// N(N+1)/2 + N(N-1): the B^z/J^z diagonal handles plus the J^x +- J^y block handles.
std::size_t handle_count(int n_qubits);

/// Dense Ising matrix in the computational basis, assembled entrywise from the
/// bit-flip (XOR) pattern between basis states.
CMatrix ising_matrix_computational(const IsingParameters& params);

/// Dense Ising matrix in the parity-permuted basis.
CMatrix ising_matrix(const IsingParameters& params);

struct IsingFit {
  IsingParameters params;
  double residual = 0.0;        ///< ||ising_matrix(params) - target||_F, Hartree
  bool rank_deficient = false;  ///< minimum-norm solution was returned
};

/// Least-squares fit of {B^z, J^z, J^x, J^y} (B^x = B^y = 0) to a target given in the
/// parity-permuted basis.
IsingFit fit_ising_params(const Matrix& permuted_target);

/// Fits blockdiag(upper, lower): even-parity sector <- upper, odd-parity sector <- lower.
IsingFit fit_ising_params(const BlockDiagonalHamiltonian& target);

}  // namespace hbdyn
