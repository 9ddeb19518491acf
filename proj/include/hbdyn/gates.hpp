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
 * @file gates.hpp
 * Gate program IR, its text form, and dense composition.
 *
 * Conventions (angles in radians):
 *   Rz(a)      = exp(-i a Z / 2)
 *   Ry(a)      = exp(-i a Y / 2)
 *   R(t, p)    = exp(-i t (cos p X + sin p Y) / 2)
 *   MS(a)      = exp(-i a X(x)X / 2)
 *   GlobalPhase(a) multiplies the state by exp(i a).
 * Qubit 0 is the most significant bit of a basis index.
 */
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hbdyn/common.hpp"

namespace hbdyn {

namespace gate {
struct Rz {
  int q;
  double angle;
  bool operator==(const Rz&) const = default;
};
struct Ry {
  int q;
  double angle;
  bool operator==(const Ry&) const = default;
};
struct R {
  int q;
  double theta;
  double phi;
  bool operator==(const R&) const = default;
};
struct Cnot {
  int control;
  int target;
  bool operator==(const Cnot&) const = default;
};
struct Ms {
  int q1;
  int q2;
  double angle;
  bool operator==(const Ms&) const = default;
};
struct GlobalPhase {
  double angle;
  bool operator==(const GlobalPhase&) const = default;
};
struct PrepareAll {
  bool operator==(const PrepareAll&) const = default;
};
struct MeasureAll {
  bool operator==(const MeasureAll&) const = default;
};
}  // namespace gate

using Gate = std::variant<gate::Rz, gate::Ry, gate::R, gate::Cnot, gate::Ms, gate::GlobalPhase,
                          gate::PrepareAll, gate::MeasureAll>;

/// Ordered gate list. Starts with PrepareAll; MeasureAll, when present, is last.
class GateProgram {
 public:
  explicit GateProgram(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  const std::vector<Gate>& gates() const { return gates_; }
  bool measured() const;

  /// Appends a gate; rejects out-of-range qubits, angles outside [-pi, pi],
  /// and anything after MeasureAll.
  GateProgram& add(Gate g);
  GateProgram& measure_all() { return add(gate::MeasureAll{}); }

  std::size_t count_cnot() const;
  std::size_t count_ms() const;
  /// Rz, Ry and R gates.
  std::size_t count_rotations() const;

  /// Full invariant check (used after parsing).
  void validate() const;

  bool operator==(const GateProgram&) const = default;

 private:
  int n_qubits_;
  std::vector<Gate> gates_;
};

/// Reduces an angle into [-pi, pi]; returns the number of 2pi shifts applied (mod 2).
double wrap_angle(double a, int* parity_flips = nullptr);

/// 2x2 matrices of the single-qubit gates.
Eigen::Matrix2cd rz_matrix(double a);
Eigen::Matrix2cd ry_matrix(double a);
Eigen::Matrix2cd r_matrix(double theta, double phi);
Eigen::Matrix4cd ms_matrix(double a);

/// Matrix of a gate together with the qubits it acts on (listed most significant first).
struct LocalOperator {
  CMatrix matrix;
  std::vector<int> qubits;
};

/// Empty for GlobalPhase, PrepareAll and MeasureAll.
std::optional<LocalOperator> local_operator(const Gate& g);

/// Left-multiplies `m` (rows indexed by n_qubits-bit basis states) by `op`.
void apply_local(CMatrix& m, const LocalOperator& op, int n_qubits);

/// Dense unitary of the whole program, global phase included.
CMatrix compose(const GateProgram& program);

/// Max-abs entry difference after aligning the global phase by the trace overlap.
double distance_up_to_phase(const CMatrix& a, const CMatrix& b);

/// Deterministic text form (see README for the grammar). Programs without a trailing
/// MeasureAll are closed with `measure_all`.
std::string emit_text(const GateProgram& program);
GateProgram parse_text(std::string_view text);

/// Angle formatting of the text form: shortest round-trip digits, fixed notation
/// for |a| in [1e-3, 1e3] (and zero), scientific otherwise.
std::string format_angle(double a);

}  // namespace hbdyn
