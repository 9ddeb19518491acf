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
#include "hbdyn/symmetry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/core.h>

namespace hbdyn {

GivensReflector build_reflector(std::size_t n_points) {
  if (n_points < 2 || !is_power_of_two(n_points)) {
    throw InvalidArgument(fmt::format("reflector size {} is not a power of two >= 2", n_points));
  }
  const std::size_t n = n_points - 1;
  const double r = 1.0 / std::sqrt(2.0);
  GivensReflector g{Matrix::Zero(n_points, n_points), std::vector<std::size_t>(n_points)};
  for (std::size_t i = 0; i < n_points; ++i) {
    g.pairing[i] = n - i;
    g.matrix(i, i) = r;
    g.matrix(i, n - i) = (2 * i < n + 1) ? r : -r;
  }
  return g;
}

Matrix closed_form_transform(const Matrix& h) {
  const auto dim = static_cast<std::size_t>(h.rows());
  const std::size_t n = dim - 1;
  const std::size_t half = dim / 2;

  // Kinetic kernel per offset from the first row, diagonal separately.
  std::vector<double> kin(dim, 0.0);
  for (std::size_t d = 1; d < dim; ++d) kin[d] = h(0, d);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t l = 0; l < dim; ++l) {
      if (i == l) continue;
      if (std::abs(h(i, l) - kin[i > l ? i - l : l - i]) > 1e-12) {
        throw NumericError(fmt::format(
            "off-diagonal part is not Toeplitz at ({}, {}); closed form does not apply", i, l));
      }
    }
  }
  auto K = [&](std::size_t a, std::size_t b) { return kin[a > b ? a - b : b - a]; };

  Matrix out = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const bool upper_i = i < half;
    for (std::size_t l = 0; l < dim; ++l) {
      const bool upper_l = l < half;
      if (upper_i == upper_l) {
        const double alpha = upper_i ? 1.0 : -1.0;
        if (i == l) {
          out(i, l) = 0.5 * (h(i, i) + h(n - i, n - i)) + alpha * K(i, n - i);
        } else {
          out(i, l) = K(i, l) + alpha * K(i, n - l);
        }
      } else if (l == n - i) {
        // Only the reflection asymmetry of the diagonal couples the sectors.
        const std::size_t up = upper_i ? i : l;
        out(i, l) = 0.5 * (h(n - up, n - up) - h(up, up));
      }
    }
  }
  return out;
}

BlockDiagonalHamiltonian transform(const NuclearHamiltonian& h) {
  const auto g = build_reflector(h.dimension());
  const Matrix similar = g.matrix * h.matrix() * g.matrix.transpose();
  const Matrix closed = closed_form_transform(h.matrix());
  const double gap = (similar - closed).cwiseAbs().maxCoeff();
  if (gap > 1e-10) {
    throw NumericError(fmt::format("closed-form transform disagrees with G H G^T by {:.3e} Ha", gap));
  }
  const auto half = static_cast<Eigen::Index>(g.half());
  BlockDiagonalHamiltonian out;
  out.transformed = similar;
  out.upper = similar.topLeftCorner(half, half);
  out.lower = similar.bottomRightCorner(half, half);
  out.upper = 0.5 * (out.upper + out.upper.transpose()).eval();
  out.lower = 0.5 * (out.lower + out.lower.transpose()).eval();
  out.off_block_residual = similar.topRightCorner(half, half).cwiseAbs().maxCoeff();
  return out;
}

NuclearHamiltonian reflection_symmetrize(const NuclearHamiltonian& h) {
  const Matrix& m = h.matrix();
  const Matrix flipped = m.reverse();
  NuclearHamiltonian out(0.5 * (m + flipped), h.grid());
  out.donor_acceptor_angstrom = h.donor_acceptor_angstrom;
  return out;
}

std::vector<std::size_t> parity_permutation(int n_qubits) {
  if (n_qubits < 1) throw InvalidArgument("parity_permutation needs at least one qubit");
  const std::size_t dim = std::size_t{1} << n_qubits;
  std::vector<std::size_t> perm;
  perm.reserve(dim);
  for (int parity = 0; parity < 2; ++parity) {
    for (std::size_t k = 0; k < dim; ++k) {
      if (std::popcount(k) % 2 == parity) perm.push_back(k);
    }
  }
  return perm;
}

IsingParameters IsingParameters::zeros(int n_qubits) {
  if (n_qubits < 1) throw InvalidArgument("Ising model needs at least one qubit");
  IsingParameters p;
  p.n_qubits = n_qubits;
  p.jx = p.jy = p.jz = Matrix::Zero(n_qubits, n_qubits);
  p.bx = p.by = p.bz = Vector::Zero(n_qubits);
  return p;
}

void IsingParameters::validate() const {
  if (n_qubits < 1) throw InvalidArgument("Ising model needs at least one qubit");
  for (const Matrix* j : {&jx, &jy, &jz}) {
    if (j->rows() != n_qubits || j->cols() != n_qubits) throw DimensionError("coupling matrix shape");
    if ((*j - j->transpose()).cwiseAbs().maxCoeff() > 0.0) {
      throw InvalidArgument("coupling matrix must be symmetric");
    }
    if (!j->diagonal().isZero(0.0)) throw InvalidArgument("coupling matrix must have zero diagonal");
  }
  for (const Vector* b : {&bx, &by, &bz}) {
    if (b->size() != n_qubits) throw DimensionError("field vector length");
  }
}

std::size_t handle_count(int n_qubits) {
  const auto n = static_cast<std::size_t>(n_qubits);
  return n * (n + 1) / 2 + n * (n - 1);
}

CMatrix ising_matrix_computational(const IsingParameters& params) {
  params.validate();
  const int nq = params.n_qubits;
  const std::size_t dim = std::size_t{1} << nq;
  auto bit = [nq](std::size_t state, int q) { return (state >> (nq - 1 - q)) & 1U; };
  const cplx I(0.0, 1.0);

  CMatrix m = CMatrix::Zero(dim, dim);
  for (std::size_t row = 0; row < dim; ++row) {
    // sigma^z eigenvalue is +1 on |0>, -1 on |1>.
    double diag = 0.0;
    for (int i = 0; i < nq; ++i) {
      const double si = bit(row, i) ? -1.0 : 1.0;
      diag += params.bz(i) * si;
      for (int j = i + 1; j < nq; ++j) diag += params.jz(i, j) * si * (bit(row, j) ? -1.0 : 1.0);
    }
    m(row, row) = diag;

    for (std::size_t col = 0; col < dim; ++col) {
      const std::size_t flipped = row ^ col;
      const int count = std::popcount(flipped);
      if (count == 1) {
        const int q = nq - 1 - std::countr_zero(flipped);
        // <1|Y|0> = i, <0|Y|1> = -i
        const double sign = bit(row, q) ? 1.0 : -1.0;
        m(row, col) = params.bx(q) + sign * I * params.by(q);
      } else if (count == 2) {
        const int lo = std::countr_zero(flipped);
        const int hi = std::bit_width(flipped) - 1;
        const int qi = nq - 1 - hi;
        const int qj = nq - 1 - lo;
        // XNOR of the flipped bits: equal bits pick up -J^y, opposite bits +J^y.
        const bool same = bit(col, qi) == bit(col, qj);
        m(row, col) = params.jx(qi, qj) + (same ? -1.0 : 1.0) * params.jy(qi, qj);
      }
    }
  }
  return m;
}

CMatrix ising_matrix(const IsingParameters& params) {
  const CMatrix comp = ising_matrix_computational(params);
  const auto perm = parity_permutation(params.n_qubits);
  const auto dim = static_cast<Eigen::Index>(perm.size());
  CMatrix out(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) out(r, c) = comp(perm[r], perm[c]);
  return out;
}

namespace {

struct ParamSlot {
  enum Kind { Bz, Jz, Jx, Jy } kind;
  int i;
  int j;
};

std::vector<ParamSlot> fit_slots(int nq) {
  std::vector<ParamSlot> slots;
  for (int i = 0; i < nq; ++i) slots.push_back({ParamSlot::Bz, i, i});
  for (auto kind : {ParamSlot::Jz, ParamSlot::Jx, ParamSlot::Jy})
    for (int i = 0; i < nq; ++i)
      for (int j = i + 1; j < nq; ++j) slots.push_back({kind, i, j});
  return slots;
}

void set_slot(IsingParameters& p, const ParamSlot& s, double value) {
  switch (s.kind) {
    case ParamSlot::Bz: p.bz(s.i) = value; break;
    case ParamSlot::Jz: p.jz(s.i, s.j) = p.jz(s.j, s.i) = value; break;
    case ParamSlot::Jx: p.jx(s.i, s.j) = p.jx(s.j, s.i) = value; break;
    case ParamSlot::Jy: p.jy(s.i, s.j) = p.jy(s.j, s.i) = value; break;
  }
}

}  // namespace

IsingFit fit_ising_params(const Matrix& target) {
  const auto dim = static_cast<std::size_t>(target.rows());
  if (target.rows() != target.cols() || dim < 2 || !is_power_of_two(dim)) {
    throw DimensionError(fmt::format("Ising fit target must be 2^N square, got {}x{}",
                                     target.rows(), target.cols()));
  }
  const int nq = log2_exact(dim);
  const auto slots = fit_slots(nq);
  const auto n_entries = static_cast<Eigen::Index>(dim * dim);

  // With B^x = B^y = 0 every basis matrix is real.
  Matrix design(n_entries, static_cast<Eigen::Index>(slots.size()));
  for (std::size_t k = 0; k < slots.size(); ++k) {
    auto unit = IsingParameters::zeros(nq);
    set_slot(unit, slots[k], 1.0);
    const Matrix basis = ising_matrix(unit).real();
    design.col(static_cast<Eigen::Index>(k)) = basis.reshaped();
  }
  const Vector rhs = target.reshaped();
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(design);
  const Vector solution = cod.solve(rhs);

  IsingFit fit;
  fit.params = IsingParameters::zeros(nq);
  for (std::size_t k = 0; k < slots.size(); ++k)
    set_slot(fit.params, slots[k], solution(static_cast<Eigen::Index>(k)));
  fit.rank_deficient = cod.rank() < static_cast<Eigen::Index>(slots.size());
  fit.residual = (ising_matrix(fit.params).real() - target).norm();
  return fit;
}

IsingFit fit_ising_params(const BlockDiagonalHamiltonian& target) {
  const auto half = target.upper.rows();
  Matrix permuted = Matrix::Zero(2 * half, 2 * half);
  permuted.topLeftCorner(half, half) = target.upper;
  permuted.bottomRightCorner(half, half) = target.lower;
  return fit_ising_params(permuted);
}

}  // namespace hbdyn
