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
 * @file hamiltonian.hpp
 * One-dimensional nuclear Hamiltonians on uniform grids: the DAF kinetic
 * kernel, assembly with a potential curve, and exact diagonalization.
 */
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hbdyn/common.hpp"

namespace hbdyn {

/// Uniform grid of 2^N points on [x_min, x_max], lengths in Bohr.
class SpatialGrid {
 public:
  SpatialGrid(std::size_t n_points, double x_min, double x_max);

  std::size_t n_points() const { return n_points_; }
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double spacing() const { return (x_max_ - x_min_) / static_cast<double>(n_points_ - 1); }
  double point(std::size_t i) const { return x_min_ + spacing() * static_cast<double>(i); }
  int n_qubits() const { return log2_exact(n_points_); }

  bool operator==(const SpatialGrid&) const = default;

 private:
  std::size_t n_points_;
  double x_min_;
  double x_max_;
};

/// Parameters of the distributed approximating functional kinetic kernel.
struct DafKineticSpec {
  double mass = units::kProtonMass;
  double sigma = 0.0;
  int m_daf = 20;

  /// Throws InvalidArgument unless mass > 0, sigma > 0, m_daf even in [0, 200].
  void validate() const;

  /// sigma = 2 * spacing, M_DAF = 20.
  static DafKineticSpec defaults_for(const SpatialGrid& grid, double mass = units::kProtonMass);
};

/// Potential energy samples, one per grid point, in Hartree.
class PotentialCurve {
 public:
  explicit PotentialCurve(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  /// max_i |V(x_i) - V(x_{n-i})|.
  double symmetry_deviation() const;

 private:
  std::vector<double> values_;
};

class NuclearHamiltonian {
 public:
  NuclearHamiltonian(Matrix matrix, SpatialGrid grid);

  const Matrix& matrix() const { return matrix_; }
  const SpatialGrid& grid() const { return grid_; }
  std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }

  /// Donor-acceptor distance the potential was computed at, when known.
  std::optional<double> donor_acceptor_angstrom;

 private:
  Matrix matrix_;
  SpatialGrid grid_;
};

struct EigenSolution {
  Vector eigenvalues;   ///< Hartree, ascending
  Matrix eigenvectors;  ///< orthonormal columns
};

/// Physicists' Hermite polynomial H_k(z) by upward recurrence; k must be even.
double hermite_even(int k, double z);

/// DAF kinetic kernel K(|x - x'|) in Hartree / Bohr (continuum kernel).
double daf_kernel(double displacement, const DafKineticSpec& spec);

/// H_il = spacing * K(x_i - x_l) + V(x_i) delta_il.
NuclearHamiltonian build_hamiltonian(const SpatialGrid& grid, const PotentialCurve& potential,
                                     const DafKineticSpec& spec);

/// The 8-point DMANH+ Hamiltonian (printed values, converted from mHa to Hartree).
NuclearHamiltonian load_builtin_dmanh();

EigenSolution exact_diagonalize(const NuclearHamiltonian& h);

struct LoadedPotential {
  SpatialGrid grid;
  PotentialCurve potential;
};

/// `x_bohr,h_0,...,h_{n-1}` rows in Hartree with 17 significant digits.
void write_hamiltonian_csv(const std::filesystem::path& path, const NuclearHamiltonian& h);
/// Inverse of write_hamiltonian_csv; the x column must be ascending and uniform.
NuclearHamiltonian read_hamiltonian_csv(const std::filesystem::path& path);

/// Reads `x_bohr,v_hartree` CSV (header row, ascending uniform x, power-of-two rows).
LoadedPotential load_potential_csv(const std::filesystem::path& path);

}  // namespace hbdyn
