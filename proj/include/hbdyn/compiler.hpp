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
 * @file compiler.hpp
 * Propagators, single- and two-qubit synthesis, CNOT to MS lowering, Trotter schedules.
 */
#pragma once

#include "hbdyn/common.hpp"
#include "hbdyn/gates.hpp"
#include "hbdyn/symmetry.hpp"

namespace hbdyn {

/// A unitary of dimension 2^k together with its measured unitarity defect.
struct TwoQubitUnitary {
  CMatrix matrix;
  double unitarity_defect = 0.0;  ///< ||U^dagger U - I||_max

  /// Throws InvalidArgument when the defect exceeds 1e-10 or the shape is not 2^k square.
  static TwoQubitUnitary from_matrix(CMatrix m);
};

/// u = exp(i alpha) Rz(beta) Ry(gamma) Rz(delta).
struct EulerAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
};

/// exp(-i block t) through the symmetric eigendecomposition.
TwoQubitUnitary block_propagator(const Matrix& block, double t);

EulerAngles euler_zyz(const Eigen::Matrix2cd& u);

/// Interaction coefficients of exp(i (a XX + b YY + c ZZ)) and the local factors around it:
/// u = exp(i phase) (k1a (x) k1b) N(a, b, c) (k2a (x) k2b).
struct CartanFactors {
  double phase = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  Eigen::Matrix2cd k1a, k1b, k2a, k2b;
};

CartanFactors cartan_factors(const TwoQubitUnitary& u);

/// Three-CNOT program with seven local rotation slots (four ZYZ-expanded local
/// unitaries plus three core rotations) and one GlobalPhase.
GateProgram cartan_decompose(const TwoQubitUnitary& u);

/// One-qubit program Rz, Ry, Rz, GlobalPhase.
GateProgram euler_program(const Eigen::Matrix2cd& u);

/// Dispatches on dimension: 2 -> euler_program, 4 -> cartan_decompose.
GateProgram compile_unitary(const TwoQubitUnitary& u);

/// Replaces every CNOT by an MS-based equivalent; the accumulated phase is folded
/// into a single trailing GlobalPhase.
GateProgram cnot_to_ms(const GateProgram& program);

/// First-order product formula for exp(-i H_Ising t) over n_steps slices. Per slice:
/// Z fields, X fields, Y fields, then ZZ, XX, YY couplings in ascending (i, j). Zero
/// transverse fields and zero couplings emit no gates.
GateProgram trotter_compile(const IsingParameters& params, double t, int n_steps);

}  // namespace hbdyn
