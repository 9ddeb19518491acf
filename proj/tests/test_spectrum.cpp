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

#include "hbdyn/spectrum.hpp"
#include "oracles.hpp"

namespace hbdyn {
namespace {

// Speed of light in cm/fs.
constexpr double kLightCmPerFs = 2.99792458e-5;

Vector cosine(Eigen::Index n, double dt_fs, double freq_cm1, double offset = 0.5, double amp = 0.3) {
  Vector x(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    x(k) = offset + amp * std::cos(2 * kPi * freq_cm1 * kLightCmPerFs * static_cast<double>(k) * dt_fs);
  }
  return x;
}

Peak strongest(const PeakSet& ps) {
  Peak best;
  for (const auto& p : ps.peaks)
    if (p.amplitude > best.amplitude) best = p;
  return best;
}

TEST(Spectrum, FrequencyAxisUsesWavenumbers) {
  const Spectrum s = signal_spectrum(Vector::Zero(1024), 0.5);
  ASSERT_EQ(s.frequencies_cm1.size(), 513);
  EXPECT_NEAR(s.bin_width(), 1.0 / (1024 * 0.5 * kLightCmPerFs), 1e-6 * s.bin_width());
  EXPECT_EQ(s.frequencies_cm1(0), 0.0);
}

TEST(Spectrum, OnGridCosineIsOneBin) {
  const Eigen::Index n = 2048;
  const double dt = 0.5;
  const double bin = 1.0 / (n * dt * kLightCmPerFs);
  const Spectrum s = signal_spectrum(cosine(n, dt, 200 * bin), dt);
  const auto ps = detect_peaks(s);
  ASSERT_EQ(ps.peaks.size(), 1u);
  // Constants differ from the atomic-unit chain at the 1e-8 level.
  EXPECT_NEAR(ps.peaks[0].frequency_cm1, 200 * bin, 1e-6 * 200 * bin);
  // |X_k| / sqrt(N) of a cosine of amplitude a is a sqrt(N) / 2.
  EXPECT_NEAR(ps.peaks[0].amplitude, 0.3 * std::sqrt(double(n)) / 2, 1e-9);
}

TEST(Spectrum, OffGridHannPeakWithinTenthOfBin) {
  const Eigen::Index n = 4096;
  const double dt = 0.5;
  const double bin = 1.0 / (n * dt * kLightCmPerFs);
  for (double frac : {0.0, 0.2, 0.37, 0.5, 0.81}) {
    const double f = (300 + frac) * bin;
    const auto p = strongest(detect_peaks(signal_spectrum(cosine(n, dt, f), dt, Window::hann)));
    EXPECT_LE(std::abs(p.frequency_cm1 - f), 0.1 * bin) << frac;
    EXPECT_LE(std::abs(p.frequency_cm1 - f), p.uncertainty_cm1 + 0.1 * bin);
  }
}

TEST(Spectrum, FlatTraceHasNoPeaks) {
  const auto ps = detect_peaks(signal_spectrum(Vector::Constant(8192, 0.125), 0.5));
  EXPECT_TRUE(ps.peaks.empty());
  EXPECT_THROW(detect_peaks(signal_spectrum(Vector::Zero(8), 0.5), 0.0), InvalidArgument);
}

TEST(Spectrum, SiteSubsetSumsSingleSiteSpectra) {
  DynamicsOptions opt;
  opt.n_steps = 256;
  const auto ts = run_dynamics(load_builtin_dmanh(), init::Site{0}, opt);
  const Spectrum both = fourier_spectrum(ts, {0, 7}, Window::hann, "site0");
  const Vector expect = signal_spectrum(ts.site_probabilities.col(0), 0.5, Window::hann).amplitudes +
                        signal_spectrum(ts.site_probabilities.col(7), 0.5, Window::hann).amplitudes;
  EXPECT_LT((both.amplitudes - expect).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(both.source, "site0");
  EXPECT_THROW(fourier_spectrum(ts, {8}), InvalidArgument);
  TimeSeries uneven = ts;
  uneven.times_fs(3) += 0.1;
  EXPECT_THROW(fourier_spectrum(uneven), InvalidArgument);
}

TEST(Spectrum, PeaksSitAtEigenvalueSplittings) {
  const auto h = load_builtin_dmanh();
  DynamicsOptions opt;
  opt.n_steps = 8192;
  const auto ts = run_dynamics(h, init::TwoSite{1, 6, kPi}, opt);
  const Spectrum s = fourier_spectrum(ts, {}, Window::hann);
  const auto ps = detect_peaks(s);
  ASSERT_FALSE(ps.peaks.empty());
  const Vector e = oracle::eigenvalues_general(h.matrix()) * units::kHartreeToWavenumber;
  for (const auto& p : ps.peaks) {
    double nearest = 1e300;
    for (int i = 0; i < 8; ++i)
      for (int j = i + 1; j < 8; ++j) nearest = std::min(nearest, std::abs(p.frequency_cm1 - (e(j) - e(i))));
    EXPECT_LE(nearest, 2 * ps.bin_width_cm1) << p.frequency_cm1;
  }
}

TEST(Spectrum, NoisyAndIdealShareDominantBin) {
  const auto h = reflection_symmetrize(load_builtin_dmanh());
  DynamicsOptions opt;
  opt.n_steps = 1024;
  opt.backend = Backend::circuit_ideal;
  const Spectrum ideal = fourier_spectrum(run_dynamics(h, init::Site{0}, opt), {}, Window::hann);
  opt.backend = Backend::circuit_noisy;
  const Spectrum noisy = fourier_spectrum(run_dynamics(h, init::Site{0}, opt), {}, Window::hann);
  Eigen::Index a = 0, b = 0;
  // Bins 0..2 hold the constant offset.
  ideal.amplitudes.tail(ideal.amplitudes.size() - 3).maxCoeff(&a);
  noisy.amplitudes.tail(noisy.amplitudes.size() - 3).maxCoeff(&b);
  EXPECT_EQ(a, b);
}

TEST(Spectrum, CombineChecksAxes) {
  const Spectrum a = signal_spectrum(cosine(64, 0.5, 3000.0), 0.5);
  Spectrum b = signal_spectrum(cosine(64, 0.5, 5000.0), 0.5);
  b.source = "b";
  const Spectrum c = combine_spectra({a, b});
  EXPECT_LT((c.amplitudes - a.amplitudes - b.amplitudes).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(c.source, "b");
  EXPECT_THROW(combine_spectra({a, signal_spectrum(cosine(64, 0.25, 1.0), 0.25)}), InvalidArgument);
  EXPECT_THROW(combine_spectra({}), InvalidArgument);
}

TEST(Spectrum, AutocorrelationNeedsAmplitudes) {
  const auto h = load_builtin_dmanh();
  DynamicsOptions opt;
  opt.n_steps = 4096;
  const auto plain = run_dynamics(h, init::Site{3}, opt);
  EXPECT_THROW(autocorrelation_spectrum(plain), InvalidArgument);
  opt.keep_amplitudes = true;
  const auto ts = run_dynamics(h, init::Site{3}, opt);
  const Spectrum s = autocorrelation_spectrum(ts, Window::hann);
  const auto p = strongest(detect_peaks(s));
  const Vector e = oracle::eigenvalues_general(h.matrix()) * units::kHartreeToWavenumber;
  double nearest = 1e300;
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) nearest = std::min(nearest, std::abs(p.frequency_cm1 - (e(j) - e(i))));
  EXPECT_LE(nearest, 2 * s.bin_width());
}

TEST(Ladder, WeightedFitOfThreeSplittings) {
  PeakSet ps;
  ps.bin_width_cm1 = 2.0;
  ps.peaks = {{100.2, 1.0, 0.5}, {150.1, 1.0, 0.5}, {249.8, 1.0, 0.5}, {777.0, 1.0, 0.5}};
  const auto l = reconstruct_ladder(ps, Vector{{0.0, 101.0, 251.0}});
  ASSERT_EQ(l.levels_cm1.size(), 3);
  // Normal equations [[2,-1],[-1,2]] x = [-49.9, 399.9].
  EXPECT_NEAR(l.levels_cm1(1), 300.1 / 3, 1e-9);
  EXPECT_NEAR(l.levels_cm1(2), 749.9 / 3, 1e-9);
  EXPECT_NEAR(l.residual_rms_cm1, 0.5 / 3, 1e-9);
  EXPECT_EQ(l.assignments.size(), 3u);
  EXPECT_GT(l.uncertainties_cm1(1), 0.0);
  EXPECT_EQ(l.uncertainties_cm1(0), 0.0);
}

TEST(Ladder, RecoversExactLevelsFromExactSplittings) {
  const Vector levels = relative_levels_cm1(load_builtin_dmanh());
  PeakSet ps;
  ps.bin_width_cm1 = 1.0;
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) ps.peaks.push_back({levels(j) - levels(i), 1.0, 0.1});
  const auto l = reconstruct_ladder(ps, levels);
  EXPECT_LT((l.levels_cm1 - levels).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Ladder, MissingConnectionsAreReported) {
  PeakSet ps;
  ps.bin_width_cm1 = 1.0;
  ps.peaks = {{100.0, 1.0, 0.3}};
  try {
    reconstruct_ladder(ps, Vector{{0.0, 100.0, 250.0}});
    FAIL() << "expected UnderConstrainedError";
  } catch (const UnderConstrainedError& e) {
    EXPECT_NE(std::string(e.what()).find("[2]"), std::string::npos) << e.what();
  }
  ps.bin_width_cm1 = 0.0;
  EXPECT_THROW(reconstruct_ladder(ps, Vector{{0.0, 100.0}}), InvalidArgument);
  EXPECT_NO_THROW(reconstruct_ladder(ps, Vector{{0.0, 100.0}}, 5.0));
  EXPECT_THROW(reconstruct_ladder(PeakSet{{}, 1.0}, Vector::Zero(8)), UnderConstrainedError);
}

TEST(Ladder, RelativeLevelsMatchGeneralEigensolver) {
  const auto h = load_builtin_dmanh();
  const Vector e = oracle::eigenvalues_general(h.matrix());
  const Vector rel = relative_levels_cm1(h);
  EXPECT_EQ(rel(0), 0.0);
  for (int k = 0; k < 8; ++k) EXPECT_NEAR(rel(k), (e(k) - e(0)) * units::kHartreeToWavenumber, 1e-8);
}

TEST(SpectrumCsv, RoundTrips) {
  const auto dir = std::filesystem::temp_directory_path() / "hbdyn_test_spectrum";
  std::filesystem::create_directories(dir);
  const Spectrum s = signal_spectrum(cosine(128, 0.5, 4000.0), 0.5, Window::hann);
  write_spectrum_csv(dir / "s.csv", s);
  const Spectrum s2 = read_spectrum_csv(dir / "s.csv");
  EXPECT_LT((s2.amplitudes - s.amplitudes).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((s2.frequencies_cm1 - s.frequencies_cm1).cwiseAbs().maxCoeff(), 1e-9);

  const PeakSet ps = detect_peaks(s);
  write_peaks_csv(dir / "p.csv", ps);
  const PeakSet ps2 = read_peaks_csv(dir / "p.csv");
  ASSERT_EQ(ps2.peaks.size(), ps.peaks.size());
  EXPECT_EQ(ps2.bin_width_cm1, 0.0);
  for (std::size_t k = 0; k < ps.peaks.size(); ++k) EXPECT_NEAR(ps2.peaks[k].frequency_cm1, ps.peaks[k].frequency_cm1, 1e-8);

  EnergyLadder l;
  l.levels_cm1 = Vector{{0.0, 916.646, 2323.077}};
  l.uncertainties_cm1 = Vector{{0.0, 0.5, 0.7}};
  write_ladder_csv(dir / "l.csv", l);
  const EnergyLadder l2 = read_ladder_csv(dir / "l.csv");
  EXPECT_EQ(l2.levels_cm1, l.levels_cm1);
  EXPECT_EQ(l2.uncertainties_cm1, l.uncertainties_cm1);

  std::ofstream(dir / "bad.csv") << "level_index,energy_cm1,uncertainty_cm1\n0,0,0\n2,1,1\n";
  EXPECT_THROW(read_ladder_csv(dir / "bad.csv"), InvalidArgument);
  EXPECT_EQ(window_from_string(to_string(Window::hann)), Window::hann);
  EXPECT_THROW(window_from_string("hamming"), InvalidArgument);
}

}  // namespace
}  // namespace hbdyn
