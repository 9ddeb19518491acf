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
#include "hbdyn/hamiltonian.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/core.h>

#include "hbdyn/csv.hpp"

namespace hbdyn {

SpatialGrid::SpatialGrid(std::size_t n_points, double x_min, double x_max)
    : n_points_(n_points), x_min_(x_min), x_max_(x_max) {
  if (n_points < 2 || !is_power_of_two(n_points)) {
    throw InvalidArgument(fmt::format("grid size {} is not a power of two >= 2", n_points));
  }
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw InvalidArgument(fmt::format("grid bounds [{}, {}] are not increasing", x_min, x_max));
  }
}

void DafKineticSpec::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidArgument("DAF mass must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("DAF sigma must be positive");
  if (m_daf < 0 || m_daf % 2 != 0 || m_daf > 200) {
    throw InvalidArgument(fmt::format("M_DAF = {} must be even and in [0, 200]", m_daf));
  }
}

DafKineticSpec DafKineticSpec::defaults_for(const SpatialGrid& grid, double mass) {
  return DafKineticSpec{mass, 2.0 * grid.spacing(), 20};
}

PotentialCurve::PotentialCurve(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) throw NumericError("potential contains non-finite values");
  }
}

double PotentialCurve::symmetry_deviation() const {
  double dev = 0.0;
  const std::size_t n = values_.size();
  for (std::size_t i = 0; i < n; ++i) dev = std::max(dev, std::abs(values_[i] - values_[n - 1 - i]));
  return dev;
}

NuclearHamiltonian::NuclearHamiltonian(Matrix matrix, SpatialGrid grid)
    : matrix_(std::move(matrix)), grid_(grid) {
  if (matrix_.rows() != matrix_.cols() ||
      static_cast<std::size_t>(matrix_.rows()) != grid_.n_points()) {
    throw DimensionError(fmt::format("Hamiltonian is {}x{} but grid has {} points",
                                     matrix_.rows(), matrix_.cols(), grid_.n_points()));
  }
  if (!matrix_.allFinite()) throw NumericError("Hamiltonian contains non-finite entries");
  if ((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw NumericError("Hamiltonian is not symmetric to 1e-12 Hartree");
  }
}

double hermite_even(int k, double z) {
  if (k < 0 || k % 2 != 0) throw InvalidArgument(fmt::format("hermite_even: order {} is not even", k));
  if (k == 0) return 1.0;
  double prev = 1.0;      // H_0
  double cur = 2.0 * z;   // H_1
  for (int j = 1; j < k; ++j) {
    const double next = 2.0 * z * cur - 2.0 * j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double daf_kernel(double displacement, const DafKineticSpec& spec) {
  spec.validate();
  const double s = spec.sigma;
  const double z = displacement / (std::sqrt(2.0) * s);
  const double prefactor = -1.0 / (4.0 * spec.mass * s * s * s * std::sqrt(2.0 * kPi));
  // Hermite polynomials share one recurrence; collect H_{2n+2} on the way up.
  double sum = 0.0;
  double coeff = 1.0;  // (-1/4)^n / n!
  double h_prev = 1.0;
  double h_cur = 2.0 * z;
  int order = 1;
  for (int n = 0; n <= spec.m_daf / 2; ++n) {
    while (order < 2 * n + 2) {
      const double next = 2.0 * z * h_cur - 2.0 * order * h_prev;
      h_prev = h_cur;
      h_cur = next;
      ++order;
    }
    sum += coeff * h_cur;
    coeff *= -0.25 / static_cast<double>(n + 1);
  }
  return prefactor * std::exp(-z * z) * sum;
}

NuclearHamiltonian build_hamiltonian(const SpatialGrid& grid, const PotentialCurve& potential,
                                     const DafKineticSpec& spec) {
  spec.validate();
  const std::size_t n = grid.n_points();
  if (potential.size() != n) {
    throw DimensionError(
        fmt::format("potential has {} values but grid has {} points", potential.size(), n));
  }
  const double dx = grid.spacing();
  // Toeplitz: one kernel evaluation per offset.
  std::vector<double> row(n);
  for (std::size_t d = 0; d < n; ++d) row[d] = dx * daf_kernel(dx * static_cast<double>(d), spec);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < n; ++l) m(i, l) = row[i > l ? i - l : l - i];
    m(i, i) += potential.values()[i];
  }
  return NuclearHamiltonian(std::move(m), grid);
}

NuclearHamiltonian load_builtin_dmanh() {
  // DMANH+ shared-proton Hamiltonian at N-N = 2.53 Angstrom, milliHartree.
  static constexpr std::array<std::array<double, 8>, 8> kMilliHartree{{
      {37.72, -7.478, 0.5691, 0.2715, -0.2739, 0.1491, -0.0584, 0.0168},
      {-7.478, 7.050, -7.478, 0.5691, 0.2715, -0.2739, 0.1491, -0.0584},
      {0.5691, -7.478, 0.00197, -7.478, 0.5691, 0.2715, -0.2739, 0.1491},
      {0.2715, 0.5691, -7.478, 0.0168, -7.478, 0.5691, 0.2715, -0.2739},
      {-0.2739, 0.2715, 0.5691, -7.478, 0.0190, -7.478, 0.5691, 0.2715},
      {0.1491, -0.2739, 0.2715, 0.5691, -7.478, 0.0, -7.478, 0.5691},
      {-0.0584, 0.1491, -0.2739, 0.2715, 0.5691, -7.478, 7.015, -7.478},
      {0.0168, -0.0584, 0.1491, -0.2739, 0.2715, 0.5691, -7.478, 37.60},
  }};
  Matrix m(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) m(i, j) = kMilliHartree[i][j] * 1e-3;
  m = 0.5 * (m + m.transpose()).eval();

  // The grid extent is not published; a nominal +-0.6 Angstrom span labels the sites.
  const double half_span = 0.6 * units::kBohrPerAngstrom;
  NuclearHamiltonian h(std::move(m), SpatialGrid(8, -half_span, half_span));
  h.donor_acceptor_angstrom = 2.53;
  return h;
}

EigenSolution exact_diagonalize(const NuclearHamiltonian& h) {
  const Matrix& m = h.matrix();
  if (!m.allFinite()) throw NumericError("exact_diagonalize: non-finite matrix entries");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) throw NumericError("symmetric eigensolver failed");
  return EigenSolution{solver.eigenvalues(), solver.eigenvectors()};
}

LoadedPotential load_potential_csv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw InvalidArgument(fmt::format("potential file '{}' does not exist", path.string()));
  }
  const auto table = csv::read(path);
  const auto name = path.string();
  if (table.header.size() != 2 || table.header[0] != "x_bohr" || table.header[1] != "v_hartree") {
    throw InvalidArgument(fmt::format("{}:1: header must be 'x_bohr,v_hartree'", name));
  }
  const std::size_t n = table.rows.size();
  if (n < 2 || !is_power_of_two(n)) {
    throw InvalidArgument(fmt::format("{}: row count {} is not a power of two >= 2", name, n));
  }
  std::vector<double> xs(n), vs(n);
  for (std::size_t r = 0; r < n; ++r) {
    xs[r] = csv::to_double(table.rows[r][0], name, table.line_numbers[r]);
    vs[r] = csv::to_double(table.rows[r][1], name, table.line_numbers[r]);
    if (r > 0 && !(xs[r] > xs[r - 1])) {
      throw InvalidArgument(
          fmt::format("{}:{}: x values must be strictly ascending", name, table.line_numbers[r]));
    }
  }
  SpatialGrid grid(n, xs.front(), xs.back());
  const double tol = 1e-6 * grid.spacing();
  for (std::size_t r = 0; r < n; ++r) {
    if (std::abs(xs[r] - grid.point(r)) > tol) {
      throw InvalidArgument(
          fmt::format("{}:{}: grid is not uniform", name, table.line_numbers[r]));
    }
  }
  return LoadedPotential{grid, PotentialCurve(std::move(vs))};
}

void write_hamiltonian_csv(const std::filesystem::path& path, const NuclearHamiltonian& h) {
  const auto n = static_cast<Eigen::Index>(h.dimension());
  std::string out = "x_bohr";
  for (Eigen::Index j = 0; j < n; ++j) out += fmt::format(",h_{}", j);
  out += "\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    out += fmt::format("{:.17g}", h.grid().point(static_cast<std::size_t>(i)));
    for (Eigen::Index j = 0; j < n; ++j) out += fmt::format(",{:.17g}", h.matrix()(i, j));
    out += "\n";
  }
  csv::write_atomic(path, out);
}

NuclearHamiltonian read_hamiltonian_csv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw InvalidArgument(fmt::format("Hamiltonian file '{}' does not exist", path.string()));
  }
  const auto table = csv::read(path);
  const auto name = path.string();
  const std::size_t n = table.rows.size();
  if (table.header.size() != n + 1 || table.header[0] != "x_bohr") {
    throw InvalidArgument(fmt::format("{}:1: header must be x_bohr,h_0,...,h_{}", name, n == 0 ? 0 : n - 1));
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (table.header[j + 1] != fmt::format("h_{}", j)) {
      throw InvalidArgument(fmt::format("{}:1: column {} should be h_{}", name, j + 1, j));
    }
  }
  if (n < 2 || !is_power_of_two(n)) {
    throw InvalidArgument(fmt::format("{}: row count {} is not a power of two >= 2", name, n));
  }
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<double> xs(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = table.rows[r];
    if (row.size() != n + 1) {
      throw InvalidArgument(fmt::format("{}:{}: expected {} fields", name, table.line_numbers[r], n + 1));
    }
    xs[r] = csv::to_double(row[0], name, table.line_numbers[r]);
    for (std::size_t c = 0; c < n; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = csv::to_double(row[c + 1], name, table.line_numbers[r]);
    }
  }
  SpatialGrid grid(n, xs.front(), xs.back());
  for (std::size_t r = 0; r < n; ++r) {
    if (std::abs(xs[r] - grid.point(r)) > 1e-6 * grid.spacing()) {
      throw InvalidArgument(fmt::format("{}:{}: grid is not uniform", name, table.line_numbers[r]));
    }
  }
  return NuclearHamiltonian(std::move(m), grid);
}

}  // namespace hbdyn
