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
#include "hbdyn/mps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <fmt/core.h>

namespace hbdyn {

namespace {

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMat>;
using ConstRowMap = Eigen::Map<const RowMat>;

struct Truncated {
  int keep;
  double discarded;
};

Truncated truncation(const Vector& sv, const TruncationPolicy& p) {
  const double total = sv.cwiseAbs2().sum();
  int keep = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (total > 0.0 && sv(k) * sv(k) / total >= p.tol) keep = static_cast<int>(k) + 1;
  }
  keep = std::clamp(keep, 1, p.chi_max);
  keep = std::min<int>(keep, static_cast<int>(sv.size()));
  double dropped = 0.0;
  for (Eigen::Index k = keep; k < sv.size(); ++k) dropped += sv(k) * sv(k);
  return {keep, dropped};
}

/// TT-SVD of a row-major tensor with the given mode sizes.
WithReport<std::vector<MpsCore>> tt_svd(const CVector& tensor, const std::vector<int>& dims,
                                        const TruncationPolicy& policy) {
  policy.validate();
  if (dims.empty()) throw InvalidArgument("tensor train needs at least one mode");
  const Eigen::Index total =
      std::accumulate(dims.begin(), dims.end(), Eigen::Index{1}, [](Eigen::Index a, int d) {
        if (d < 1) throw InvalidArgument("mode sizes must be positive");
        return a * d;
      });
  if (tensor.size() != total) {
    throw DimensionError(fmt::format("tensor has {} entries, modes imply {}", tensor.size(), total));
  }
  WithReport<std::vector<MpsCore>> out;
  RowMat rest = ConstRowMap(tensor.data(), 1, total);
  int r_prev = 1;
  for (std::size_t j = 0; j + 1 < dims.size(); ++j) {
    const Eigen::Index rows = static_cast<Eigen::Index>(r_prev) * dims[j];
    const Eigen::Index cols = rest.size() / rows;
    const RowMat m = RowMap(rest.data(), rows, cols);
    Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Truncated tr = truncation(svd.singularValues(), policy);
    out.report.discarded_weight += tr.discarded;
    out.report.max_bond_before = std::max<int>(out.report.max_bond_before, static_cast<int>(svd.singularValues().size()));
    MpsCore core{r_prev, dims[j], tr.keep, CVector(rows * tr.keep)};
    RowMap(core.data.data(), rows, tr.keep) = svd.matrixU().leftCols(tr.keep);
    out.value.push_back(std::move(core));
    rest = svd.singularValues().head(tr.keep).cast<cplx>().asDiagonal() *
           svd.matrixV().leftCols(tr.keep).adjoint();
    rest = RowMat(RowMap(rest.data(), 1, rest.size()));
    r_prev = tr.keep;
  }
  MpsCore last{r_prev, dims.back(), 1, CVector(rest.size())};
  RowMap(last.data.data(), 1, rest.size()) = rest;
  out.value.push_back(std::move(last));
  int after = 1;
  for (const auto& c : out.value) after = std::max(after, c.right);
  out.report.max_bond_after = after;
  out.report.max_bond_before = std::max(out.report.max_bond_before, 1);
  return out;
}

/// sum_s A_s^H env A_s
CMatrix left_step(const CMatrix& env, const MpsCore& c) {
  CMatrix next = CMatrix::Zero(c.right, c.right);
  for (int s = 0; s < c.phys; ++s) {
    const CMatrix a = c.slice(s);
    next.noalias() += a.adjoint() * env * a;
  }
  return next;
}

/// sum_s A_s env A_s^H
CMatrix right_step(const CMatrix& env, const MpsCore& c) {
  CMatrix next = CMatrix::Zero(c.left, c.left);
  for (int s = 0; s < c.phys; ++s) {
    const CMatrix a = c.slice(s);
    next.noalias() += a * env * a.adjoint();
  }
  return next;
}

int max_bond_of(const MpsState& s) {
  int m = 1;
  for (int b : s.bond_dims()) m = std::max(m, b);
  return m;
}

}  // namespace

CMatrix MpsCore::slice(int s) const {
  CMatrix m(left, right);
  for (int l = 0; l < left; ++l)
    for (int r = 0; r < right; ++r) m(l, r) = (*this)(l, s, r);
  return m;
}

void TruncationPolicy::validate() const {
  if (chi_max < 1) throw InvalidArgument(fmt::format("chi_max must be >= 1, got {}", chi_max));
  if (!(tol >= 0.0)) throw InvalidArgument("truncation tolerance must be non-negative");
}

std::vector<int> MpsState::site_dims() const {
  std::vector<int> d;
  for (const auto& c : cores) d.push_back(c.phys);
  return d;
}

std::vector<int> MpsState::bond_dims() const {
  std::vector<int> b;
  for (std::size_t j = 0; j + 1 < cores.size(); ++j) b.push_back(cores[j].right);
  return b;
}

int MpsState::max_bond() const { return max_bond_of(*this); }

void MpsState::validate() const {
  if (cores.empty()) throw DimensionError("MPS has no cores");
  if (cores.front().left != 1 || cores.back().right != 1) throw DimensionError("MPS boundary bonds must be 1");
  for (std::size_t j = 0; j < cores.size(); ++j) {
    const auto& c = cores[j];
    if (c.data.size() != static_cast<Eigen::Index>(c.left) * c.phys * c.right) {
      throw DimensionError(fmt::format("MPS core {} storage does not match its shape", j));
    }
    if (j + 1 < cores.size() && c.right != cores[j + 1].left) {
      throw DimensionError(fmt::format("MPS bond {} mismatch: {} vs {}", j, c.right, cores[j + 1].left));
    }
  }
}

CVector MpsState::to_dense() const {
  validate();
  RowMat v = RowMat::Ones(1, 1);
  for (const auto& c : cores) {
    const RowMat next = v * ConstRowMap(c.data.data(), c.left, static_cast<Eigen::Index>(c.phys) * c.right);
    v = RowMat(ConstRowMap(next.data(), next.size() / c.right, c.right));
  }
  return Eigen::Map<const CVector>(v.data(), v.size());
}

double MpsState::norm() const {
  validate();
  CMatrix env = CMatrix::Ones(1, 1);
  for (const auto& c : cores) env = left_step(env, c);
  return std::sqrt(std::max(0.0, env(0, 0).real()));
}

std::vector<int> MpoOperator::site_dims() const {
  std::vector<int> d;
  for (const auto& c : cores) d.push_back(c.out);
  return d;
}

std::vector<int> MpoOperator::bond_dims() const {
  std::vector<int> b;
  for (std::size_t j = 0; j + 1 < cores.size(); ++j) b.push_back(cores[j].right);
  return b;
}

void MpoOperator::validate() const {
  if (cores.empty()) throw DimensionError("MPO has no cores");
  if (cores.front().left != 1 || cores.back().right != 1) throw DimensionError("MPO boundary bonds must be 1");
  for (std::size_t j = 0; j < cores.size(); ++j) {
    const auto& c = cores[j];
    if (c.data.size() != static_cast<Eigen::Index>(c.left) * c.out * c.in * c.right) {
      throw DimensionError(fmt::format("MPO core {} storage does not match its shape", j));
    }
    if (j + 1 < cores.size() && c.right != cores[j + 1].left) {
      throw DimensionError(fmt::format("MPO bond {} mismatch", j));
    }
  }
}

CMatrix MpoOperator::to_dense() const {
  validate();
  // t[o][i][r] over the processed prefix.
  Eigen::Index po = 1, pi = 1;
  int pr = 1;
  std::vector<cplx> t{cplx(1.0)};
  for (const auto& c : cores) {
    const Eigen::Index no = po * c.out, ni = pi * c.in;
    std::vector<cplx> next(static_cast<std::size_t>(no * ni * c.right), cplx(0.0));
    for (Eigen::Index o = 0; o < po; ++o)
      for (Eigen::Index i = 0; i < pi; ++i)
        for (int r = 0; r < pr; ++r) {
          const cplx v = t[static_cast<std::size_t>((o * pi + i) * pr + r)];
          if (v == cplx(0.0)) continue;
          for (int oj = 0; oj < c.out; ++oj)
            for (int ij = 0; ij < c.in; ++ij)
              for (int r2 = 0; r2 < c.right; ++r2) {
                const Eigen::Index oo = o * c.out + oj, ii = i * c.in + ij;
                next[static_cast<std::size_t>((oo * ni + ii) * c.right + r2)] += v * c(r, oj, ij, r2);
              }
        }
    t = std::move(next);
    po = no;
    pi = ni;
    pr = c.right;
  }
  CMatrix m(po, pi);
  for (Eigen::Index o = 0; o < po; ++o)
    for (Eigen::Index i = 0; i < pi; ++i) m(o, i) = t[static_cast<std::size_t>(o * pi + i)];
  return m;
}

std::size_t MpoOperator::parameter_count() const {
  std::size_t n = 0;
  for (const auto& c : cores) n += static_cast<std::size_t>(c.data.size());
  return n;
}

Matrix kinetic_matrix(const SpatialGrid& grid, const DafKineticSpec& spec) {
  const PotentialCurve zero(std::vector<double>(grid.n_points(), 0.0));
  return build_hamiltonian(grid, zero, spec).matrix();
}

MpoOperator kinetic_mpo(const std::vector<SpatialGrid>& grids, const std::vector<DafKineticSpec>& specs) {
  if (grids.empty() || grids.size() != specs.size()) {
    throw InvalidArgument("kinetic_mpo needs one spec per grid and at least one dimension");
  }
  const std::size_t n = grids.size();
  MpoOperator op;
  for (std::size_t j = 0; j < n; ++j) {
    const Matrix k = kinetic_matrix(grids[j], specs[j]);
    const int d = static_cast<int>(k.rows());
    const int left = j == 0 ? 1 : 2;
    const int right = j + 1 == n ? 1 : 2;
    MpoCore c{left, d, d, right, CVector::Zero(static_cast<Eigen::Index>(left) * d * d * right)};
    // Bond state 0: no kinetic factor placed yet; 1: placed.
    auto put = [&](int l, int r, bool kinetic) {
      for (int o = 0; o < d; ++o)
        for (int i = 0; i < d; ++i) c(l, o, i, r) = kinetic ? cplx(k(o, i)) : cplx(o == i ? 1.0 : 0.0);
    };
    if (n == 1) {
      put(0, 0, true);
    } else if (j == 0) {
      put(0, 0, false);
      put(0, 1, true);
    } else if (j + 1 == n) {
      put(0, 0, true);
      put(1, 0, false);
    } else {
      put(0, 0, false);
      put(0, 1, true);
      put(1, 1, false);
    }
    op.cores.push_back(std::move(c));
  }
  return op;
}

WithReport<MpsState> mps_from_dense(const CVector& tensor, const std::vector<int>& dims,
                                    const TruncationPolicy& policy) {
  auto tt = tt_svd(tensor, dims, policy);
  return {MpsState{std::move(tt.value)}, tt.report};
}

WithReport<MpoOperator> mpo_from_dense(const CMatrix& op, const std::vector<int>& dims,
                                       const TruncationPolicy& policy) {
  Eigen::Index total = 1;
  for (int d : dims) total *= d;
  if (op.rows() != total || op.cols() != total) {
    throw DimensionError(fmt::format("operator is {}x{}, modes imply {}", op.rows(), op.cols(), total));
  }
  const std::size_t n = dims.size();
  std::vector<int> paired(n);
  for (std::size_t j = 0; j < n; ++j) paired[j] = dims[j] * dims[j];
  // Interleave (o_j, i_j) per site.
  CVector t(total * total);
  std::vector<int> od(n), id(n);
  for (Eigen::Index o = 0; o < total; ++o) {
    Eigen::Index rem = o;
    for (std::size_t j = n; j-- > 0;) {
      od[j] = static_cast<int>(rem % dims[j]);
      rem /= dims[j];
    }
    for (Eigen::Index i = 0; i < total; ++i) {
      rem = i;
      for (std::size_t j = n; j-- > 0;) {
        id[j] = static_cast<int>(rem % dims[j]);
        rem /= dims[j];
      }
      Eigen::Index idx = 0;
      for (std::size_t j = 0; j < n; ++j) idx = idx * paired[j] + od[j] * dims[j] + id[j];
      t(idx) = op(o, i);
    }
  }
  auto tt = tt_svd(t, paired, policy);
  MpoOperator mpo;
  for (std::size_t j = 0; j < n; ++j) {
    auto& c = tt.value[j];
    mpo.cores.push_back(MpoCore{c.left, dims[j], dims[j], c.right, std::move(c.data)});
  }
  return {std::move(mpo), tt.report};
}

MpsState apply_mpo(const MpoOperator& op, const MpsState& state) {
  op.validate();
  state.validate();
  if (op.size() != state.size()) throw DimensionError("MPO and MPS have different lengths");
  MpsState out;
  for (std::size_t j = 0; j < op.size(); ++j) {
    const auto& w = op.cores[j];
    const auto& a = state.cores[j];
    if (w.in != a.phys) {
      throw DimensionError(fmt::format("site {}: MPO input dim {} vs state dim {}", j, w.in, a.phys));
    }
    MpsCore c{a.left * w.left, w.out, a.right * w.right,
              CVector::Zero(static_cast<Eigen::Index>(a.left) * w.left * w.out * a.right * w.right)};
    for (int la = 0; la < a.left; ++la)
      for (int lb = 0; lb < w.left; ++lb)
        for (int o = 0; o < w.out; ++o)
          for (int ra = 0; ra < a.right; ++ra)
            for (int rb = 0; rb < w.right; ++rb) {
              cplx acc = 0.0;
              for (int i = 0; i < w.in; ++i) acc += w(lb, o, i, rb) * a(la, i, ra);
              c(la * w.left + lb, o, ra * w.right + rb) = acc;
            }
    out.cores.push_back(std::move(c));
  }
  return out;
}

WithReport<MpsState> compress(const MpsState& state, const TruncationPolicy& policy, bool normalize) {
  policy.validate();
  state.validate();
  WithReport<MpsState> out{state, {}};
  auto& cores = out.value.cores;
  out.report.max_bond_before = max_bond_of(state);
  for (std::size_t j = 0; j + 1 < cores.size(); ++j) {
    auto& c = cores[j];
    const Eigen::Index rows = static_cast<Eigen::Index>(c.left) * c.phys;
    const CMatrix m = ConstRowMap(c.data.data(), rows, c.right);
    Eigen::HouseholderQR<CMatrix> qr(m);
    const int k = static_cast<int>(std::min<Eigen::Index>(rows, c.right));
    const CMatrix q = qr.householderQ() * CMatrix::Identity(rows, k);
    const CMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    c.right = k;
    c.data.resize(rows * k);
    RowMap(c.data.data(), rows, k) = q;
    auto& nx = cores[j + 1];
    const Eigen::Index ncols = static_cast<Eigen::Index>(nx.phys) * nx.right;
    const RowMat merged = r * ConstRowMap(nx.data.data(), nx.left, ncols);
    nx.left = k;
    nx.data = Eigen::Map<const CVector>(merged.data(), merged.size());
  }
  for (std::size_t j = cores.size(); j-- > 1;) {
    auto& c = cores[j];
    const Eigen::Index cols = static_cast<Eigen::Index>(c.phys) * c.right;
    const CMatrix m = ConstRowMap(c.data.data(), c.left, cols);
    Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Truncated tr = truncation(svd.singularValues(), policy);
    out.report.discarded_weight += tr.discarded;
    c.left = tr.keep;
    c.data.resize(static_cast<Eigen::Index>(tr.keep) * cols);
    RowMap(c.data.data(), tr.keep, cols) = svd.matrixV().leftCols(tr.keep).adjoint();
    const CMatrix us = svd.matrixU().leftCols(tr.keep) * svd.singularValues().head(tr.keep).cast<cplx>().asDiagonal();
    auto& pv = cores[j - 1];
    const Eigen::Index prow = static_cast<Eigen::Index>(pv.left) * pv.phys;
    const RowMat merged = ConstRowMap(pv.data.data(), prow, pv.right) * us;
    pv.right = tr.keep;
    pv.data = Eigen::Map<const CVector>(merged.data(), merged.size());
  }
  if (normalize) {
    const double nrm = cores.front().data.norm();
    if (nrm > 0.0) cores.front().data /= nrm;
  }
  out.report.max_bond_after = max_bond_of(out.value);
  return out;
}

MpsTrajectory propagate_nd(const CMatrix& h, const MpsState& initial, double t, int n_substeps,
                           const TruncationPolicy& policy) {
  policy.validate();
  initial.validate();
  if (n_substeps < 1) throw InvalidArgument("n_substeps must be >= 1");
  const auto dims = initial.site_dims();
  Eigen::Index total = 1;
  for (int d : dims) total *= d;
  if (h.rows() != total || h.cols() != total) throw DimensionError("Hamiltonian does not match the state dimensions");
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
    throw InvalidArgument("Hamiltonian is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const double dt = t / n_substeps;
  CVector ph(total);
  for (Eigen::Index k = 0; k < total; ++k) ph(k) = std::polar(1.0, -es.eigenvalues()(k) * dt);
  const CMatrix u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
  TruncationPolicy op_policy{std::min(policy.tol, 1e-14), std::numeric_limits<int>::max() / 4};
  const auto mpo = mpo_from_dense(u, dims, op_policy).value;

  MpsTrajectory traj;
  for (int b : mpo.bond_dims()) traj.mpo_max_bond = std::max(traj.mpo_max_bond, b);
  traj.states.push_back(initial);
  for (int k = 0; k < n_substeps; ++k) {
    const MpsState raw = apply_mpo(mpo, traj.states.back());
    if (max_bond_of(raw) > 4 * policy.chi_max) {
      throw NumericError(fmt::format("substep {}: bond dimension {} exceeds 4 x chi_max = {}", k,
                                     max_bond_of(raw), 4 * policy.chi_max));
    }
    auto c = compress(raw, policy, false);
    traj.discarded_weights.push_back(c.report.discarded_weight);
    traj.states.push_back(std::move(c.value));
  }
  return traj;
}

std::vector<Vector> marginals(const MpsState& state) {
  state.validate();
  const std::size_t n = state.size();
  std::vector<CMatrix> left(n + 1), right(n + 1);
  left[0] = CMatrix::Ones(1, 1);
  for (std::size_t j = 0; j < n; ++j) left[j + 1] = left_step(left[j], state.cores[j]);
  right[n] = CMatrix::Ones(1, 1);
  for (std::size_t j = n; j-- > 0;) right[j] = right_step(right[j + 1], state.cores[j]);
  std::vector<Vector> out;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& c = state.cores[j];
    Vector p(c.phys);
    for (int s = 0; s < c.phys; ++s) {
      const CMatrix a = c.slice(s);
      p(s) = (a.adjoint() * left[j] * a * right[j + 1]).trace().real();
    }
    out.push_back(p);
  }
  return out;
}

std::vector<Vector> dense_marginals(const CVector& psi, const std::vector<int>& dims) {
  std::vector<Vector> out;
  for (int d : dims) out.push_back(Vector::Zero(d));
  for (Eigen::Index idx = 0; idx < psi.size(); ++idx) {
    Eigen::Index rem = idx;
    const double p = std::norm(psi(idx));
    for (std::size_t j = dims.size(); j-- > 0;) {
      out[j](rem % dims[j]) += p;
      rem /= dims[j];
    }
  }
  return out;
}

Model2d double_well_harmonic_model(int points) {
  if (points < 4 || !is_power_of_two(static_cast<std::size_t>(points))) {
    throw InvalidArgument("model needs a power-of-two point count >= 4");
  }
  Model2d m;
  const auto n = static_cast<std::size_t>(points);
  m.grids = {SpatialGrid(n, -1.2, 1.2), SpatialGrid(n, -1.0, 1.0)};
  m.specs = {DafKineticSpec::defaults_for(m.grids[0]), DafKineticSpec::defaults_for(m.grids[1])};
  const double barrier = 0.01, well = 0.6;  // Hartree, Bohr
  const double omega = 0.005;
  const double coupling = 0.004;  // Hartree / Bohr^2
  m.potential.resize(points, points);
  for (int i = 0; i < points; ++i) {
    const double x1 = m.grids[0].point(static_cast<std::size_t>(i));
    for (int j = 0; j < points; ++j) {
      const double x2 = m.grids[1].point(static_cast<std::size_t>(j));
      const double q = (x1 / well) * (x1 / well) - 1.0;
      m.potential(i, j) = barrier * q * q + 0.5 * units::kProtonMass * omega * omega * x2 * x2 + coupling * x1 * x2;
    }
  }
  const Matrix k1 = kinetic_matrix(m.grids[0], m.specs[0]);
  const Matrix k2 = kinetic_matrix(m.grids[1], m.specs[1]);
  const Matrix id = Matrix::Identity(points, points);
  m.hamiltonian = Matrix::Zero(points * points, points * points);
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < points; ++j) {
      m.hamiltonian.block(i * points, j * points, points, points) += k1(i, j) * id;
      m.hamiltonian.block(i * points, j * points, points, points) += (i == j ? 1.0 : 0.0) * k2;
    }
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < points; ++j) m.hamiltonian(i * points + j, i * points + j) += m.potential(i, j);
  m.initial.resize(points * points);
  for (int i = 0; i < points; ++i) {
    const double x1 = m.grids[0].point(static_cast<std::size_t>(i));
    for (int j = 0; j < points; ++j) {
      const double x2 = m.grids[1].point(static_cast<std::size_t>(j));
      const double g1 = std::exp(-std::pow((x1 + well) / 0.3, 2));
      const double g2 = std::exp(-std::pow(x2 / 0.35, 2));
      m.initial(i * points + j) = g1 * g2;
    }
  }
  m.initial.normalize();
  return m;
}

namespace {

void put_values(std::string& out, const CVector& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) out += fmt::format("{:.17g} {:.17g}\n", v(k).real(), v(k).imag());
}

CVector take_values(std::istringstream& in, Eigen::Index n, const char* what) {
  CVector v(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double re = 0.0, im = 0.0;
    if (!(in >> re >> im)) throw InvalidArgument(fmt::format("{}: truncated value list", what));
    v(k) = cplx(re, im);
  }
  return v;
}

}  // namespace

std::string serialize(const MpsState& s) {
  s.validate();
  std::string out = fmt::format("mps {}\n", s.size());
  for (const auto& c : s.cores) {
    out += fmt::format("core {} {} {}\n", c.left, c.phys, c.right);
    put_values(out, c.data);
  }
  return out;
}

std::string serialize(const MpoOperator& o) {
  o.validate();
  std::string out = fmt::format("mpo {}\n", o.size());
  for (const auto& c : o.cores) {
    out += fmt::format("core {} {} {} {}\n", c.left, c.out, c.in, c.right);
    put_values(out, c.data);
  }
  return out;
}

MpsState parse_mps(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  std::size_t n = 0;
  if (!(in >> tag >> n) || tag != "mps") throw InvalidArgument("mps text must start with 'mps <n>'");
  MpsState s;
  for (std::size_t j = 0; j < n; ++j) {
    MpsCore c;
    if (!(in >> tag >> c.left >> c.phys >> c.right) || tag != "core" || c.left < 1 || c.phys < 1 || c.right < 1) {
      throw InvalidArgument(fmt::format("mps core {}: bad shape line", j));
    }
    c.data = take_values(in, static_cast<Eigen::Index>(c.left) * c.phys * c.right, "mps");
    s.cores.push_back(std::move(c));
  }
  s.validate();
  return s;
}

MpoOperator parse_mpo(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  std::size_t n = 0;
  if (!(in >> tag >> n) || tag != "mpo") throw InvalidArgument("mpo text must start with 'mpo <n>'");
  MpoOperator o;
  for (std::size_t j = 0; j < n; ++j) {
    MpoCore c;
    if (!(in >> tag >> c.left >> c.out >> c.in >> c.right) || tag != "core" || c.left < 1 || c.out < 1 ||
        c.in < 1 || c.right < 1) {
      throw InvalidArgument(fmt::format("mpo core {}: bad shape line", j));
    }
    c.data = take_values(in, static_cast<Eigen::Index>(c.left) * c.out * c.in * c.right, "mpo");
    o.cores.push_back(std::move(c));
  }
  o.validate();
  return o;
}

}  // namespace hbdyn
