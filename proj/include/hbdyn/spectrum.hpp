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
 * @file spectrum.hpp
 * Fourier spectra of site-probability traces, peak detection, spectrum combination and
 * energy-ladder reconstruction from overcomplete splittings.
 */
#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hbdyn/common.hpp"
#include "hbdyn/dynamics.hpp"

namespace hbdyn {

enum class Window { rectangular, hann };

std::string to_string(Window w);
Window window_from_string(const std::string& s);

/// One-sided magnitude spectrum, |X_k| / sqrt(N), on a uniform cm^-1 axis starting at 0.
struct Spectrum {
  Vector frequencies_cm1;
  Vector amplitudes;
  Window window = Window::rectangular;
  std::string source;

  double bin_width() const;
};

struct Peak {
  double frequency_cm1 = 0.0;
  double amplitude = 0.0;
  double uncertainty_cm1 = 0.0;
};

struct PeakSet {
  std::vector<Peak> peaks;
  double bin_width_cm1 = 0.0;  ///< 0 when unknown (e.g. read back from CSV)
};

struct EnergyLadder {
  Vector levels_cm1;         ///< level 0 anchored at 0
  Vector uncertainties_cm1;  ///< standard errors from the fit covariance
  double residual_rms_cm1 = 0.0;
  /// (peak frequency, (i, j)) for every splitting used in the fit.
  std::vector<std::pair<double, std::pair<int, int>>> assignments;
};

/// Sum over `sites` (all when empty) of per-site magnitude spectra. The mean is kept;
/// peak detection ignores the zero-frequency bin.
Spectrum fourier_spectrum(const TimeSeries& series, const std::vector<std::size_t>& sites = {},
                          Window window = Window::rectangular, std::string source = {});

/// Magnitude spectrum of one uniformly sampled real signal.
Spectrum signal_spectrum(const Vector& samples, double dt_fs, Window window = Window::rectangular);

Spectrum combine_spectra(const std::vector<Spectrum>& spectra);

/// Local maxima above threshold_factor x median (zero-frequency bin excluded), refined by
/// three-point parabolic interpolation.
PeakSet detect_peaks(const Spectrum& spectrum, double threshold_factor = 5.0);

/// Assigns peaks to predicted splittings E_j - E_i (greedy by deviation, each pair once per
/// peak set, deviation at most max_deviation_cm1) and fits levels with E_0 = 0. A
/// non-positive max_deviation_cm1 selects 3 bin widths.
EnergyLadder reconstruct_ladder(const std::vector<PeakSet>& peak_sets, const Vector& predicted_levels_cm1,
                                double max_deviation_cm1 = 0.0);
EnergyLadder reconstruct_ladder(const PeakSet& peaks, const Vector& predicted_levels_cm1,
                                double max_deviation_cm1 = 0.0);

/// Spectrum of |<psi(0)|psi(t)>|^2; needs a series with amplitudes.
Spectrum autocorrelation_spectrum(const TimeSeries& series, Window window = Window::rectangular);

/// Relative eigenenergies (cm^-1) of `h`, lowest at 0.
Vector relative_levels_cm1(const NuclearHamiltonian& h);

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s);
Spectrum read_spectrum_csv(const std::filesystem::path& path);
void write_peaks_csv(const std::filesystem::path& path, const PeakSet& p);
PeakSet read_peaks_csv(const std::filesystem::path& path);
void write_ladder_csv(const std::filesystem::path& path, const EnergyLadder& l);
/// Levels and uncertainties only; assignments are not persisted.
EnergyLadder read_ladder_csv(const std::filesystem::path& path);

}  // namespace hbdyn
