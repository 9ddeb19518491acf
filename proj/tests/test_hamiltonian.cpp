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
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hbdyn/hamiltonian.hpp"
#include "oracles.hpp"

namespace hbdyn {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "hbdyn_test_hamiltonian";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

TEST(SpatialGrid, RejectsNonPowerOfTwoAndBadBounds) {
  EXPECT_THROW(SpatialGrid(6, 0.0, 1.0), InvalidArgument);
  EXPECT_THROW(SpatialGrid(1, 0.0, 1.0), InvalidArgument);
  EXPECT_THROW(SpatialGrid(8, 1.0, 1.0), InvalidArgument);
  const SpatialGrid g(8, -1.0, 1.0);
  EXPECT_EQ(g.n_qubits(), 3);
  EXPECT_DOUBLE_EQ(g.point(7), 1.0);
  EXPECT_NEAR(g.spacing(), 2.0 / 7.0, 1e-15);
}

TEST(Hermite, MatchesExplicitPolynomials) {
  for (double z : {-1.3, 0.0, 0.4, 2.2}) {
    EXPECT_DOUBLE_EQ(hermite_even(0, z), 1.0);
    EXPECT_NEAR(hermite_even(2, z), 4 * z * z - 2, 1e-12);
    EXPECT_NEAR(hermite_even(4, z), 16 * std::pow(z, 4) - 48 * z * z + 12, 1e-10);
    EXPECT_NEAR(hermite_even(6, z), 64 * std::pow(z, 6) - 480 * std::pow(z, 4) + 720 * z * z - 120, 1e-8);
  }
  EXPECT_THROW(hermite_even(3, 0.1), InvalidArgument);
}

TEST(DafKernel, LowestOrderIsGaussianSecondDerivative) {
  const DafKineticSpec spec{1.7, 0.3, 0};
  for (double x : {0.0, 0.1, 0.25, 0.6, 1.1}) {
    const double s = spec.sigma;
    const double g = std::exp(-x * x / (2 * s * s)) / (s * std::sqrt(2 * kPi));
    const double want = -(1.0 / (2 * spec.mass)) * (x * x / std::pow(s, 4) - 1 / (s * s)) * g;
    EXPECT_NEAR(daf_kernel(x, spec), want, 1e-12 * std::abs(want) + 1e-14) << "x=" << x;
  }
}

TEST(DafKernel, EvenAndDecaying) {
  const DafKineticSpec spec{units::kProtonMass, 0.2, 20};
  EXPECT_DOUBLE_EQ(daf_kernel(0.37, spec), daf_kernel(-0.37, spec));
  EXPECT_LT(std::abs(daf_kernel(15 * spec.sigma, spec)), 1e-15 * std::abs(daf_kernel(0.0, spec)));
  const DafKineticSpec low{1.0, 0.2, 4};
  EXPECT_LT(std::abs(daf_kernel(10 * low.sigma, low)), 1e-15 * std::abs(daf_kernel(0.0, low)));
}

TEST(DafKernel, ValidatesParameters) {
  EXPECT_THROW(daf_kernel(0.0, DafKineticSpec{-1.0, 0.2, 20}), InvalidArgument);
  EXPECT_THROW(daf_kernel(0.0, DafKineticSpec{1.0, 0.0, 20}), InvalidArgument);
  EXPECT_THROW(daf_kernel(0.0, DafKineticSpec{1.0, 0.2, 3}), InvalidArgument);
  EXPECT_THROW(daf_kernel(0.0, DafKineticSpec{1.0, 0.2, 202}), InvalidArgument);
}

TEST(BuildHamiltonian, KineticActsAsSecondDerivativeOnSmoothFunctions) {
  const SpatialGrid grid(128, -12.0, 12.0);
  const double mass = 1.0;
  const auto h = build_hamiltonian(grid, PotentialCurve(std::vector<double>(128, 0.0)),
                                   DafKineticSpec::defaults_for(grid, mass));
  // Gaussian of width s: -f''/2m = (1/s^2 - x^2/s^4) f / 2m.
  const double s = 1.5;
  Vector f(128), expect(128);
  for (int i = 0; i < 128; ++i) {
    const double x = grid.point(static_cast<std::size_t>(i));
    f(i) = std::exp(-x * x / (2 * s * s));
    expect(i) = (1 / (s * s) - x * x / (s * s * s * s)) * f(i) / (2 * mass);
  }
  const Vector tf = h.matrix() * f;
  EXPECT_LT((tf - expect).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(BuildHamiltonian, SymmetricPotentialGivesPersymmetricMatrix) {
  const SpatialGrid grid(16, -1.0, 1.0);
  std::vector<double> v(16);
  for (std::size_t i = 0; i < 16; ++i) v[i] = 0.01 * std::pow(grid.point(i), 4) - 0.02 * std::pow(grid.point(i), 2);
  const auto h = build_hamiltonian(grid, PotentialCurve(v), DafKineticSpec::defaults_for(grid));
  const Matrix& m = h.matrix();
  EXPECT_LT((m - m.reverse()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-18);
  EXPECT_LT(PotentialCurve(v).symmetry_deviation(), 1e-17);
}

TEST(BuildHamiltonian, ParticleInBoxLowLevels) {
  const std::size_t n = 64;
  const double length = 2.0;
  const double mass = units::kProtonMass;
  const SpatialGrid grid(n, 0.0, length);
  const double e1 = kPi * kPi / (2 * mass * length * length);
  std::vector<double> v(n, 0.0);
  v.front() = v.back() = 1e6 * e1;
  const auto h = build_hamiltonian(grid, PotentialCurve(v), DafKineticSpec::defaults_for(grid, mass));
  const Vector e = exact_diagonalize(h).eigenvalues;
  for (int k = 0; k < 3; ++k) {
    const double want = e1 * (k + 1) * (k + 1);
    EXPECT_NEAR(e(k), want, 0.01 * want) << "level " << k;
  }
}

TEST(BuildHamiltonian, DimensionMismatchThrows) {
  const SpatialGrid grid(8, 0.0, 1.0);
  EXPECT_THROW(build_hamiltonian(grid, PotentialCurve(std::vector<double>(4, 0.0)), DafKineticSpec::defaults_for(grid)),
               DimensionError);
  EXPECT_THROW(PotentialCurve({0.0, std::nan("")}), NumericError);
}

TEST(NuclearHamiltonian, RejectsAsymmetricMatrix) {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 1) = 1e-3;
  EXPECT_THROW(NuclearHamiltonian(m, SpatialGrid(4, 0.0, 1.0)), NumericError);
  EXPECT_THROW(NuclearHamiltonian(Matrix::Zero(4, 4), SpatialGrid(8, 0.0, 1.0)), DimensionError);
}

TEST(Builtin, PrintedEntries) {
  const auto h = load_builtin_dmanh();
  ASSERT_EQ(h.dimension(), 8u);
  EXPECT_NEAR(h.matrix()(0, 0), 37.72e-3, 1e-15);
  EXPECT_NEAR(h.matrix()(7, 7), 37.60e-3, 1e-15);
  EXPECT_NEAR(h.matrix()(0, 1), -7.478e-3, 1e-15);
  EXPECT_NEAR(h.matrix()(0, 7), 0.0168e-3, 1e-15);
  EXPECT_NEAR(*h.donor_acceptor_angstrom, 2.53, 0.0);
}

TEST(ExactDiagonalize, AgreesWithGeneralSolverOnBuiltin) {
  const auto h = load_builtin_dmanh();
  const auto sol = exact_diagonalize(h);
  ASSERT_EQ(sol.eigenvalues.size(), 8);
  for (int k = 1; k < 8; ++k) EXPECT_LT(sol.eigenvalues(k - 1), sol.eigenvalues(k));
  EXPECT_LT((sol.eigenvalues - oracle::eigenvalues_general(h.matrix())).cwiseAbs().maxCoeff(), 1e-14);
  const Matrix& v = sol.eigenvectors;
  EXPECT_LT((v.transpose() * v - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((h.matrix() * v - v * sol.eigenvalues.asDiagonal()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(sol.eigenvalues.sum(), h.matrix().trace(), 1e-15);
}

TEST(HamiltonianCsv, RoundTripsExactly) {
  const auto h = load_builtin_dmanh();
  const auto path = scratch("h.csv");
  write_hamiltonian_csv(path, h);
  const auto back = read_hamiltonian_csv(path);
  EXPECT_EQ(back.matrix(), h.matrix());
  EXPECT_NEAR(back.grid().x_min(), h.grid().x_min(), 1e-15);
  EXPECT_EQ(back.grid().n_points(), 8u);
}

TEST(HamiltonianCsv, ReportsMissingFileAndBadHeader) {
  EXPECT_THROW(read_hamiltonian_csv(scratch("absent.csv")), InvalidArgument);
  const auto p = scratch("bad.csv");
  write_file(p, "x,h_0,h_1\n0,1,0\n1,0,1\n");
  try {
    read_hamiltonian_csv(p);
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find(":1:"), std::string::npos) << e.what();
  }
}

TEST(PotentialCsv, LoadsUniformGrid) {
  const auto p = scratch("v.csv");
  write_file(p, "x_bohr,v_hartree\n-1,0.5\n-0.5,0.1\n0,0\n0.5,0.1\n");
  const auto loaded = load_potential_csv(p);
  EXPECT_EQ(loaded.grid.n_points(), 4u);
  EXPECT_DOUBLE_EQ(loaded.grid.x_max(), 0.5);
  EXPECT_DOUBLE_EQ(loaded.potential.values()[1], 0.1);
}

TEST(PotentialCsv, RejectsNonUniformAndNamesLine) {
  const auto p = scratch("v_bad.csv");
  write_file(p, "x_bohr,v_hartree\n0,0\n1,0\n2.5,0\n3,0\n");
  try {
    load_potential_csv(p);
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find(":4:"), std::string::npos) << e.what();
  }
  const auto q = scratch("v_rows.csv");
  write_file(q, "x_bohr,v_hartree\n0,0\n1,0\n2,0\n");
  EXPECT_THROW(load_potential_csv(q), InvalidArgument);
  EXPECT_THROW(load_potential_csv(scratch("nope.csv")), InvalidArgument);
}

}  // namespace
}  // namespace hbdyn
