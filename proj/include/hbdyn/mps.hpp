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
 * @file mps.hpp
 * Tensor-train states and operators: TT-SVD factorization, MPO application with merged
 * bond indices, SVD compression and substep propagation.
 *
 * Every core carries left and right bond indices; the outer bonds have dimension 1, so the
 * first and last cores are order-2 (states) or order-3 (operators) in effect. Dense vectors
 * and matrices use row-major multi-indices with site 0 slowest.
 */
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hbdyn/common.hpp"
#include "hbdyn/hamiltonian.hpp"

namespace hbdyn {

/// Core A[l][s][r] stored row-major.
struct MpsCore {
  int left = 1;
  int phys = 1;
  int right = 1;
  CVector data;

  cplx& operator()(int l, int s, int r) { return data((static_cast<Eigen::Index>(l) * phys + s) * right + r); }
  cplx operator()(int l, int s, int r) const {
    return data((static_cast<Eigen::Index>(l) * phys + s) * right + r);
  }
  /// left x right slice at physical index s.
  CMatrix slice(int s) const;
};

/// Core W[l][out][in][r] stored row-major.
struct MpoCore {
  int left = 1;
  int out = 1;
  int in = 1;
  int right = 1;
  CVector data;

  Eigen::Index index(int l, int o, int i, int r) const {
    return ((static_cast<Eigen::Index>(l) * out + o) * in + i) * right + r;
  }
  cplx& operator()(int l, int o, int i, int r) { return data(index(l, o, i, r)); }
  cplx operator()(int l, int o, int i, int r) const { return data(index(l, o, i, r)); }
};

struct MpsState {
  std::vector<MpsCore> cores;

  std::size_t size() const { return cores.size(); }
  std::vector<int> site_dims() const;
  /// Internal bond dimensions (size - 1 entries).
  std::vector<int> bond_dims() const;
  int max_bond() const;
  /// Throws DimensionError on inconsistent bonds or an empty chain.
  void validate() const;
  CVector to_dense() const;
  double norm() const;
};

struct MpoOperator {
  std::vector<MpoCore> cores;

  std::size_t size() const { return cores.size(); }
  std::vector<int> site_dims() const;
  std::vector<int> bond_dims() const;
  void validate() const;
  CMatrix to_dense() const;
  /// Total stored complex entries.
  std::size_t parameter_count() const;
};

struct CompressionReport {
  double discarded_weight = 0.0;  ///< sum of squared discarded singular values
  int max_bond_before = 0;
  int max_bond_after = 0;
};

struct TruncationPolicy {
  double tol = 1e-12;  ///< drop singular values with s^2 / sum s^2 < tol
  int chi_max = 64;

  void validate() const;
};

template <class T>
struct WithReport {
  T value;
  CompressionReport report;
};

/// Sum over dimensions of I (x) ... (x) K_i (x) ... (x) I with bond dimension 2.
MpoOperator kinetic_mpo(const std::vector<SpatialGrid>& grids, const std::vector<DafKineticSpec>& specs);

/// Dense one-dimensional kinetic matrix spacing * K(x_i - x_l).
Matrix kinetic_matrix(const SpatialGrid& grid, const DafKineticSpec& spec);

WithReport<MpsState> mps_from_dense(const CVector& tensor, const std::vector<int>& dims,
                                    const TruncationPolicy& policy = {});
WithReport<MpoOperator> mpo_from_dense(const CMatrix& op, const std::vector<int>& dims,
                                       const TruncationPolicy& policy = {});

/// Exact contraction; output bond j has dimension alpha_j * beta_j.
MpsState apply_mpo(const MpoOperator& op, const MpsState& state);

/// Left-canonical QR sweep, then right-to-left truncated SVD.
WithReport<MpsState> compress(const MpsState& state, const TruncationPolicy& policy = {},
                              bool normalize = false);

struct MpsTrajectory {
  std::vector<MpsState> states;           ///< initial state first
  std::vector<double> discarded_weights;  ///< per substep
  int mpo_max_bond = 0;
};

/// Repeated application of a TT-SVD factorized exp(-i H t / n_substeps) with compression.
/// Throws NumericError if a pre-compression bond exceeds 4 * chi_max.
MpsTrajectory propagate_nd(const CMatrix& h_dense, const MpsState& initial, double t, int n_substeps,
                           const TruncationPolicy& policy = {});

/// Per-dimension site probabilities (marginals of |psi|^2).
std::vector<Vector> marginals(const MpsState& state);

/// Marginals of a dense wavefunction with the given dimensions.
std::vector<Vector> dense_marginals(const CVector& psi, const std::vector<int>& dims);

/// Two-dimensional test model: double well along x1, harmonic along x2, bilinear coupling.
struct Model2d {
  std::vector<SpatialGrid> grids;
  std::vector<DafKineticSpec> specs;
  Matrix potential;  ///< V(x1_i, x2_j)
  Matrix hamiltonian;
  CVector initial;   ///< product of Gaussians, centred in the left well
};
Model2d double_well_harmonic_model(int points_per_dim = 8);

std::string serialize(const MpsState& s);
std::string serialize(const MpoOperator& o);
MpsState parse_mps(const std::string& text);
MpoOperator parse_mpo(const std::string& text);

}  // namespace hbdyn
