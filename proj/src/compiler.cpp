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
#include "hbdyn/compiler.hpp"

#include <array>
#include <cmath>

#include <fmt/core.h>

namespace hbdyn {

namespace {

constexpr double kUnitaryTol = 1e-10;

double defect_of(const CMatrix& m) {
  return (m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

Eigen::Matrix4cd magic_basis() {
  const double r = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  Eigen::Matrix4cd b;
  b << r, 0, 0, i * r,
       0, i * r, r, 0,
       0, i * r, -r, 0,
       r, 0, 0, -i * r;
  return b;
}

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return k;
}

Eigen::Matrix2cd pauli(char p) {
  Eigen::Matrix2cd m;
  const cplx i(0.0, 1.0);
  switch (p) {
    case 'x': m << 0, 1, 1, 0; break;
    case 'y': m << 0, -i, i, 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

/// Diagonals of XX, YY, ZZ in the magic basis (entries are +-1).
std::array<Eigen::Vector4d, 3> magic_signs() {
  const Eigen::Matrix4cd b = magic_basis();
  std::array<Eigen::Vector4d, 3> out;
  const char names[3] = {'x', 'y', 'z'};
  for (int k = 0; k < 3; ++k) {
    const Eigen::Matrix4cd p = kron2(pauli(names[k]), pauli(names[k]));
    out[k] = (b.adjoint() * p * b).diagonal().real();
  }
  return out;
}

/// Splits k = a (x) b with det a = det b = 1 (up to a shared sign).
void split_tensor(const Eigen::Matrix4cd& k, Eigen::Matrix2cd& a, Eigen::Matrix2cd& b) {
  int bi = 0, bj = 0;
  double best = -1.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double n = k.block<2, 2>(2 * i, 2 * j).norm();
      if (n > best) {
        best = n;
        bi = i;
        bj = j;
      }
    }
  }
  const Eigen::Matrix2cd blk = k.block<2, 2>(2 * bi, 2 * bj);
  b = blk / std::sqrt(blk.determinant());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = (b.adjoint() * k.block<2, 2>(2 * i, 2 * j)).trace() / 2.0;
  const double resid = (kron2(a, b) - k).cwiseAbs().maxCoeff();
  if (resid > 1e-8) {
    throw NumericError(fmt::format("local factor is not a tensor product (residual {:.3e})", resid));
  }
}

/// Real orthogonal P (det +1) diagonalizing the symmetric unitary m.
Eigen::Matrix4d simultaneous_diagonalizer(const Eigen::Matrix4cd& m) {
  const Eigen::Matrix4d re = m.real();
  const Eigen::Matrix4d im = m.imag();
  constexpr std::array<double, 6> mix = {1.0, 0.5772156649015329, 1.618033988749895,
                                         2.718281828459045, 0.3183098861837907, 4.1231056256176606};
  for (double r : mix) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(re + r * im);
    Eigen::Matrix4d p = es.eigenvectors();
    if (p.determinant() < 0) p.col(0) = -p.col(0);
    Eigen::Matrix4cd d = p.transpose() * m * p;
    d.diagonal().setZero();
    if (d.cwiseAbs().maxCoeff() < 1e-10) return p;
  }
  throw NumericError("could not diagonalize the magic-basis Gram matrix");
}

void append_zyz(GateProgram& prog, int q, const Eigen::Matrix2cd& u) {
  const EulerAngles e = euler_zyz(u);
  prog.add(gate::Rz{q, e.delta});
  prog.add(gate::Ry{q, e.gamma});
  prog.add(gate::Rz{q, e.beta});
}

void append_phase_fix(GateProgram& prog, const CMatrix& target) {
  const CMatrix c = compose(prog);
  const cplx overlap = (c.adjoint() * target).trace();
  prog.add(gate::GlobalPhase{wrap_angle(std::arg(overlap))});
}

}  // namespace

TwoQubitUnitary TwoQubitUnitary::from_matrix(CMatrix m) {
  if (m.rows() != m.cols() || !is_power_of_two(static_cast<std::size_t>(m.rows())) || m.rows() < 2) {
    throw InvalidArgument(fmt::format("unitary must be 2^k square, got {}x{}", m.rows(), m.cols()));
  }
  if (!m.allFinite()) throw InvalidArgument("unitary has non-finite entries");
  const double defect = defect_of(m);
  if (defect > kUnitaryTol) {
    throw InvalidArgument(fmt::format("matrix is not unitary (defect {:.3e})", defect));
  }
  return TwoQubitUnitary{std::move(m), defect};
}

TwoQubitUnitary block_propagator(const Matrix& block, double t) {
  if (block.rows() != block.cols() || block.rows() == 0) throw InvalidArgument("block must be square");
  const double scale = std::max(1.0, block.cwiseAbs().maxCoeff());
  if ((block - block.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("block is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(block);
  const Matrix& v = es.eigenvectors();
  CVector phases(block.rows());
  for (Eigen::Index k = 0; k < block.rows(); ++k) phases(k) = std::polar(1.0, -es.eigenvalues()(k) * t);
  CMatrix u = v.cast<cplx>() * phases.asDiagonal() * v.transpose().cast<cplx>();
  return TwoQubitUnitary::from_matrix(std::move(u));
}

EulerAngles euler_zyz(const Eigen::Matrix2cd& u) {
  const double defect = defect_of(u);
  if (!u.allFinite() || defect > kUnitaryTol) {
    throw InvalidArgument(fmt::format("euler_zyz: matrix is not unitary (defect {:.3e})", defect));
  }
  EulerAngles e;
  e.alpha = std::arg(u.determinant()) / 2.0;
  const Eigen::Matrix2cd v = u * std::polar(1.0, -e.alpha);
  const double c = std::abs(v(0, 0));
  const double s = std::abs(v(1, 0));
  e.gamma = 2.0 * std::atan2(s, c);
  if (c < 1e-14) {
    e.beta = 2.0 * std::arg(v(1, 0));
  } else if (s < 1e-14) {
    e.beta = 2.0 * std::arg(v(1, 1));
  } else {
    e.beta = std::arg(v(1, 1)) + std::arg(v(1, 0));
    e.delta = std::arg(v(1, 1)) - std::arg(v(1, 0));
  }
  const Eigen::Matrix2cd rec = rz_matrix(e.beta) * ry_matrix(e.gamma) * rz_matrix(e.delta);
  if ((rec + v).cwiseAbs().maxCoeff() < (rec - v).cwiseAbs().maxCoeff()) e.alpha += kPi;
  int flips = 0, total = 0;
  e.beta = wrap_angle(e.beta, &flips);
  total += flips;
  e.gamma = wrap_angle(e.gamma, &flips);
  total += flips;
  e.delta = wrap_angle(e.delta, &flips);
  total += flips;
  e.alpha = wrap_angle(e.alpha + kPi * (total % 2));
  return e;
}

CartanFactors cartan_factors(const TwoQubitUnitary& u) {
  if (u.matrix.rows() != 4) throw DimensionError("cartan decomposition needs a 4x4 unitary");
  const Eigen::Matrix4cd m4 = u.matrix;
  const cplx det = m4.determinant();
  const double phase0 = std::arg(det) / 4.0;
  const Eigen::Matrix4cd su = m4 * std::polar(1.0, -phase0);
  const Eigen::Matrix4cd b = magic_basis();
  const Eigen::Matrix4cd up = b.adjoint() * su * b;
  const Eigen::Matrix4cd gram = up.transpose() * up;
  const Eigen::Matrix4d p = simultaneous_diagonalizer(gram);
  const Eigen::Vector4cd d = (p.transpose() * gram * p).diagonal();

  Eigen::Vector4d theta;
  for (int k = 0; k < 4; ++k) theta(k) = std::arg(d(k)) / 2.0;
  Eigen::Vector4cd inv_phase;
  for (int k = 0; k < 4; ++k) inv_phase(k) = std::polar(1.0, -theta(k));
  Eigen::Matrix4cd k1 = up * p.cast<cplx>() * inv_phase.asDiagonal();
  if (k1.real().determinant() < 0) {
    theta(0) += kPi;
    k1.col(0) = -k1.col(0);
  }
  if (k1.imag().cwiseAbs().maxCoeff() > 1e-8) throw NumericError("left magic factor is not real");

  const auto signs = magic_signs();
  Eigen::Matrix4d design;
  design.col(0).setOnes();
  for (int k = 0; k < 3; ++k) design.col(k + 1) = signs[k];
  const Eigen::Vector4d coef = design.fullPivLu().solve(theta);

  CartanFactors f;
  f.phase = phase0 + coef(0);
  f.a = coef(1);
  f.b = coef(2);
  f.c = coef(3);
  const Eigen::Matrix4cd left = b * k1.real().cast<cplx>() * b.adjoint();
  const Eigen::Matrix4cd right = b * p.transpose().cast<cplx>() * b.adjoint();
  split_tensor(left, f.k1a, f.k1b);
  split_tensor(right, f.k2a, f.k2b);
  // Coefficients are only defined mod pi/2 after absorbing X(x)X-type Paulis into a local factor.
  const std::array<char, 3> axes = {'x', 'y', 'z'};
  std::array<double*, 3> vals = {&f.a, &f.b, &f.c};
  for (int k = 0; k < 3; ++k) {
    const double shift = std::floor(*vals[k] / (kPi / 2.0) + 0.5);
    if (shift == 0.0) continue;
    *vals[k] -= shift * kPi / 2.0;
    const long long n = static_cast<long long>(shift);
    // exp(i n pi/2 PP) = i^n (PP)^n
    if (((n % 2) + 2) % 2 == 1) {
      f.k1a = f.k1a * pauli(axes[k]);
      f.k1b = f.k1b * pauli(axes[k]);
    }
    f.phase += static_cast<double>(n) * kPi / 2.0;
  }
  return f;
}

GateProgram cartan_decompose(const TwoQubitUnitary& u) {
  const CartanFactors f = cartan_factors(u);
  GateProgram prog(2);
  append_zyz(prog, 0, f.k2a);
  append_zyz(prog, 1, rz_matrix(-kPi / 2.0) * f.k2b);
  prog.add(gate::Cnot{1, 0});
  prog.add(gate::Rz{0, wrap_angle(kPi / 2.0 - 2.0 * f.c)});
  prog.add(gate::Ry{1, wrap_angle(2.0 * f.a - kPi / 2.0)});
  prog.add(gate::Cnot{0, 1});
  prog.add(gate::Ry{1, wrap_angle(kPi / 2.0 - 2.0 * f.b)});
  prog.add(gate::Cnot{1, 0});
  append_zyz(prog, 0, f.k1a * rz_matrix(kPi / 2.0));
  append_zyz(prog, 1, f.k1b);
  append_phase_fix(prog, u.matrix);
  const double d = distance_up_to_phase(compose(prog), u.matrix);
  if (d > 1e-9) throw NumericError(fmt::format("cartan reconstruction distance {:.3e}", d));
  return prog;
}

GateProgram euler_program(const Eigen::Matrix2cd& u) {
  const EulerAngles e = euler_zyz(u);
  GateProgram prog(1);
  prog.add(gate::Rz{0, e.delta});
  prog.add(gate::Ry{0, e.gamma});
  prog.add(gate::Rz{0, e.beta});
  prog.add(gate::GlobalPhase{e.alpha});
  return prog;
}

GateProgram compile_unitary(const TwoQubitUnitary& u) {
  switch (u.matrix.rows()) {
    case 2: return euler_program(u.matrix);
    case 4: return cartan_decompose(u);
    default:
      throw DimensionError(fmt::format("no synthesis for a {}-dimensional unitary", u.matrix.rows()));
  }
}

GateProgram cnot_to_ms(const GateProgram& program) {
  GateProgram out(program.n_qubits());
  double phase = 0.0;
  bool any_phase = false;
  bool measured = false;
  for (const auto& g : program.gates()) {
    if (const auto* c = std::get_if<gate::Cnot>(&g)) {
      out.add(gate::Ry{c->control, kPi / 2.0});
      out.add(gate::Ms{c->control, c->target, -kPi / 2.0});
      out.add(gate::Ry{c->control, -kPi / 2.0});
      out.add(gate::Rz{c->control, kPi / 2.0});
      out.add(gate::R{c->target, kPi / 2.0, 0.0});
      phase += kPi / 4.0;
      any_phase = true;
    } else if (const auto* p = std::get_if<gate::GlobalPhase>(&g)) {
      phase += p->angle;
      any_phase = true;
    } else if (std::holds_alternative<gate::PrepareAll>(g)) {
    } else if (std::holds_alternative<gate::MeasureAll>(g)) {
      measured = true;
    } else {
      out.add(g);
    }
  }
  if (any_phase) out.add(gate::GlobalPhase{wrap_angle(phase)});
  if (measured) out.measure_all();
  return out;
}

namespace {

struct PhaseAccumulator {
  double total = 0.0;
  double wrap(double a) {
    int flips = 0;
    const double w = wrap_angle(a, &flips);
    total += kPi * flips;
    return w;
  }
};

void append_coupling(GateProgram& prog, PhaseAccumulator& ph, char axis, int i, int j, double angle) {
  const double ms = ph.wrap(angle);
  switch (axis) {
    case 'z':
      prog.add(gate::Ry{i, kPi / 2.0});
      prog.add(gate::Ry{j, kPi / 2.0});
      prog.add(gate::Ms{i, j, ms});
      prog.add(gate::Ry{i, -kPi / 2.0});
      prog.add(gate::Ry{j, -kPi / 2.0});
      break;
    case 'y':
      prog.add(gate::Rz{i, -kPi / 2.0});
      prog.add(gate::Rz{j, -kPi / 2.0});
      prog.add(gate::Ms{i, j, ms});
      prog.add(gate::Rz{i, kPi / 2.0});
      prog.add(gate::Rz{j, kPi / 2.0});
      break;
    default:
      prog.add(gate::Ms{i, j, ms});
      break;
  }
}

}  // namespace

GateProgram trotter_compile(const IsingParameters& params, double t, int n_steps) {
  params.validate();
  if (n_steps < 1) throw InvalidArgument(fmt::format("n_steps must be >= 1, got {}", n_steps));
  if (!std::isfinite(t)) throw InvalidArgument("time must be finite");
  const int n = params.n_qubits;
  const double dt = t / n_steps;
  GateProgram prog(n);
  PhaseAccumulator ph;
  for (int step = 0; step < n_steps; ++step) {
    for (int i = 0; i < n; ++i) prog.add(gate::Rz{i, ph.wrap(2.0 * params.bz(i) * dt)});
    for (int i = 0; i < n; ++i) {
      if (params.bx(i) != 0.0) prog.add(gate::R{i, ph.wrap(2.0 * params.bx(i) * dt), 0.0});
    }
    for (int i = 0; i < n; ++i) {
      if (params.by(i) != 0.0) prog.add(gate::R{i, ph.wrap(2.0 * params.by(i) * dt), kPi / 2.0});
    }
    const std::array<std::pair<char, const Matrix*>, 3> terms = {
        std::pair{'z', &params.jz}, std::pair{'x', &params.jx}, std::pair{'y', &params.jy}};
    for (const auto& [axis, j] : terms) {
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
          if ((*j)(a, b) != 0.0) append_coupling(prog, ph, axis, a, b, 2.0 * (*j)(a, b) * dt);
        }
    }
  }
  prog.add(gate::GlobalPhase{wrap_angle(ph.total)});
  prog.measure_all();
  return prog;
}

}  // namespace hbdyn
