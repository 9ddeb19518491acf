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
 * @file common.hpp
 * Shared numeric types, unit conversions and the error hierarchy.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hbdyn {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

namespace units {
/// CODATA 2018 values.
inline constexpr double kHartreeToWavenumber = 219474.6313632;  // cm^-1 per Hartree
inline constexpr double kAtomicTimeFs = 0.02418884254;          // fs per a.u. of time
inline constexpr double kBohrPerAngstrom = 1.0 / 0.529177210903;
inline constexpr double kProtonMass = 1836.15267343;            // electron masses

inline constexpr double fs_to_au(double fs) { return fs / kAtomicTimeFs; }
inline constexpr double au_to_fs(double au) { return au * kAtomicTimeFs; }
inline constexpr double hartree_to_wavenumber(double e) { return e * kHartreeToWavenumber; }
inline constexpr double wavenumber_to_hartree(double w) { return w / kHartreeToWavenumber; }

/// Cycles per femtosecond -> energy spacing in cm^-1 (E = 2 pi hbar f).
inline constexpr double cycles_per_fs_to_wavenumber(double f) {
  return 2.0 * kPi * f * kAtomicTimeFs * kHartreeToWavenumber;
}
}  // namespace units

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad arguments, inconsistent shapes, unreadable files.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Non-finite values, failed internal consistency checks.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Analysis cannot determine the requested quantities from the data.
class UnderConstrainedError : public Error {
 public:
  using Error::Error;
};

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline int log2_exact(std::size_t n) {
  int k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

}  // namespace hbdyn
