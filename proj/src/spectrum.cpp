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
#include "hbdyn/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <fftw3.h>
#include <fmt/core.h>

#include "hbdyn/csv.hpp"

namespace hbdyn {

namespace {

double uniform_step(const Vector& times) {
  if (times.size() < 4) throw InvalidArgument("time series needs at least 4 samples");
  const double dt = times(1) - times(0);
  if (!(dt > 0.0)) throw InvalidArgument("time axis must be increasing");
  for (Eigen::Index k = 1; k < times.size(); ++k) {
    const double step = times(k) - times(k - 1);
    if (std::abs(step - dt) > 1e-6 * dt) {
      throw InvalidArgument(fmt::format("non-uniform time grid at sample {} (step {} vs {})", k, step, dt));
    }
  }
  return dt;
}

/// One-sided |X_k| / sqrt(N) for k = 0 .. N/2.
Vector magnitudes(const Vector& x, Window window) {
  const auto n = static_cast<int>(x.size());
  std::vector<double> in(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double w = window == Window::hann ? 0.5 * (1.0 - std::cos(2.0 * kPi * k / n)) : 1.0;
    in[static_cast<std::size_t>(k)] = w * x(k);
  }
  const int m = n / 2 + 1;
  auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(m)));
  if (!out) throw NumericError("FFT buffer allocation failed");
  fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.data(), out, FFTW_ESTIMATE);
  fftw_execute(plan);
  Vector mag(m);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < m; ++k) mag(k) = std::hypot(out[k][0], out[k][1]) * scale;
  fftw_destroy_plan(plan);
  fftw_free(out);
  return mag;
}

Vector frequency_axis(Eigen::Index n_samples, double dt_fs) {
  const Eigen::Index m = n_samples / 2 + 1;
  Vector f(m);
  const double df = 1.0 / (static_cast<double>(n_samples) * dt_fs);
  for (Eigen::Index k = 0; k < m; ++k) f(k) = units::cycles_per_fs_to_wavenumber(static_cast<double>(k) * df);
  return f;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

}  // namespace

std::string to_string(Window w) { return w == Window::hann ? "hann" : "rectangular"; }

Window window_from_string(const std::string& s) {
  if (s == "rectangular") return Window::rectangular;
  if (s == "hann") return Window::hann;
  throw InvalidArgument(fmt::format("unknown window '{}' (rectangular, hann)", s));
}

double Spectrum::bin_width() const {
  if (frequencies_cm1.size() < 2) throw InvalidArgument("spectrum has fewer than two bins");
  return frequencies_cm1(1) - frequencies_cm1(0);
}

Spectrum signal_spectrum(const Vector& samples, double dt_fs, Window window) {
  if (!(dt_fs > 0.0)) throw InvalidArgument("sampling step must be positive");
  if (samples.size() < 4) throw InvalidArgument("signal needs at least 4 samples");
  if (!samples.allFinite()) throw NumericError("signal has non-finite samples");
  return Spectrum{frequency_axis(samples.size(), dt_fs), magnitudes(samples, window), window, {}};
}

Spectrum fourier_spectrum(const TimeSeries& series, const std::vector<std::size_t>& sites, Window window,
                          std::string source) {
  const double dt = uniform_step(series.times_fs);
  std::vector<std::size_t> chosen = sites;
  const auto n_sites = static_cast<std::size_t>(series.site_probabilities.cols());
  if (chosen.empty()) {
    chosen.resize(n_sites);
    std::iota(chosen.begin(), chosen.end(), std::size_t{0});
  }
  Spectrum total;
  for (std::size_t s : chosen) {
    if (s >= n_sites) throw InvalidArgument(fmt::format("site {} out of range ({} sites)", s, n_sites));
    const Spectrum one = signal_spectrum(series.site_probabilities.col(static_cast<Eigen::Index>(s)), dt, window);
    if (total.amplitudes.size() == 0) {
      total = one;
    } else {
      total.amplitudes += one.amplitudes;
    }
  }
  total.source = std::move(source);
  return total;
}

Spectrum combine_spectra(const std::vector<Spectrum>& spectra) {
  if (spectra.empty()) throw InvalidArgument("combine_spectra needs at least one spectrum");
  Spectrum out = spectra.front();
  for (std::size_t k = 1; k < spectra.size(); ++k) {
    const auto& s = spectra[k];
    if (s.frequencies_cm1.size() != out.frequencies_cm1.size() ||
        (s.frequencies_cm1 - out.frequencies_cm1).cwiseAbs().maxCoeff() >
            1e-9 * std::max(1.0, out.frequencies_cm1.cwiseAbs().maxCoeff())) {
      throw InvalidArgument(fmt::format("spectrum {} has a different frequency axis", k));
    }
    out.amplitudes += s.amplitudes;
    if (!s.source.empty()) out.source += (out.source.empty() ? "" : "+") + s.source;
  }
  return out;
}

PeakSet detect_peaks(const Spectrum& spectrum, double threshold_factor) {
  if (!(threshold_factor > 0.0)) throw InvalidArgument("threshold_factor must be positive");
  const Vector& a = spectrum.amplitudes;
  PeakSet out;
  out.bin_width_cm1 = spectrum.bin_width();
  if (a.size() < 4) return out;
  std::vector<double> rest(a.data() + 1, a.data() + a.size());
  auto mid = rest.begin() + static_cast<std::ptrdiff_t>(rest.size() / 2);
  std::nth_element(rest.begin(), mid, rest.end());
  // Dynamic-range floor: window leakage ripple and roundoff sit below 1e-8 of the strongest bin.
  const double threshold = std::max(threshold_factor * *mid, 1e-8 * a.cwiseAbs().maxCoeff());
  const double bin = out.bin_width_cm1;
  for (Eigen::Index k = 1; k + 1 < a.size(); ++k) {
    if (!(a(k) > a(k - 1) && a(k) >= a(k + 1) && a(k) > threshold)) continue;
    const double denom = a(k - 1) - 2.0 * a(k) + a(k + 1);
    const double delta = denom < 0.0 ? 0.5 * (a(k - 1) - a(k + 1)) / denom : 0.0;
    Peak p;
    p.frequency_cm1 = spectrum.frequencies_cm1(k) + delta * bin;
    p.amplitude = a(k) - 0.25 * (a(k - 1) - a(k + 1)) * delta;
    p.uncertainty_cm1 = 0.5 * std::abs(delta) * bin + bin / std::sqrt(12.0);
    out.peaks.push_back(p);
  }
  return out;
}

EnergyLadder reconstruct_ladder(const std::vector<PeakSet>& peak_sets, const Vector& predicted, double max_dev) {
  const auto n = static_cast<int>(predicted.size());
  if (n < 2) throw InvalidArgument("ladder needs at least two predicted levels");
  struct Row {
    double f, sigma;
    int i, j;
  };
  std::vector<Row> rows;
  for (const auto& ps : peak_sets) {
    double tol = max_dev;
    if (!(tol > 0.0)) {
      if (!(ps.bin_width_cm1 > 0.0)) {
        throw InvalidArgument("peak set has no bin width; give an explicit maximum deviation");
      }
      tol = 3.0 * ps.bin_width_cm1;
    }
    struct Cand {
      double dev;
      std::size_t peak;
      int i, j;
    };
    std::vector<Cand> cands;
    for (std::size_t p = 0; p < ps.peaks.size(); ++p) {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          const double dev = std::abs(ps.peaks[p].frequency_cm1 - std::abs(predicted(j) - predicted(i)));
          if (dev <= tol) cands.push_back({dev, p, i, j});
        }
      }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.dev < y.dev; });
    std::vector<bool> peak_used(ps.peaks.size(), false);
    std::vector<bool> pair_used(static_cast<std::size_t>(n * n), false);
    for (const auto& c : cands) {
      const auto pair = static_cast<std::size_t>(c.i * n + c.j);
      if (peak_used[c.peak] || pair_used[pair]) continue;
      peak_used[c.peak] = pair_used[pair] = true;
      const Peak& pk = ps.peaks[c.peak];
      double sigma = pk.uncertainty_cm1;
      if (!(sigma > 0.0)) sigma = ps.bin_width_cm1 > 0.0 ? ps.bin_width_cm1 / std::sqrt(12.0) : 1.0;
      // Orient so the row reads E_hi - E_lo = f.
      const bool up = predicted(c.j) >= predicted(c.i);
      rows.push_back({pk.frequency_cm1, sigma, up ? c.i : c.j, up ? c.j : c.i});
    }
  }

  UnionFind uf(n);
  for (const auto& r : rows) uf.unite(r.i, r.j);
  std::vector<int> missing;
  for (int k = 1; k < n; ++k) {
    if (uf.find(k) != uf.find(0)) missing.push_back(k);
  }
  if (!missing.empty()) {
    std::string names;
    for (int k : missing) names += (names.empty() ? "" : ", ") + std::to_string(k);
    throw UnderConstrainedError(fmt::format(
        "{} assigned splittings leave levels [{}] unconnected to level 0", rows.size(), names));
  }

  const auto m = static_cast<Eigen::Index>(rows.size());
  Matrix a = Matrix::Zero(m, n - 1);
  Vector f(m), w(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (row.j > 0) a(r, row.j - 1) += 1.0;
    if (row.i > 0) a(r, row.i - 1) -= 1.0;
    f(r) = row.f;
    w(r) = 1.0 / (row.sigma * row.sigma);
  }
  const Vector sw = w.cwiseSqrt();
  const Matrix aw = sw.asDiagonal() * a;
  const Vector x = aw.colPivHouseholderQr().solve(sw.cwiseProduct(f));
  const Vector resid = a * x - f;
  const double chi2 = resid.cwiseAbs2().cwiseProduct(w).sum();
  const Eigen::Index dof = m - (n - 1);
  const double scale = dof > 0 ? std::max(1.0, chi2 / static_cast<double>(dof)) : 1.0;
  const Matrix cov = (aw.transpose() * aw).inverse() * scale;

  EnergyLadder out;
  out.levels_cm1 = Vector::Zero(n);
  out.uncertainties_cm1 = Vector::Zero(n);
  out.levels_cm1.tail(n - 1) = x;
  out.uncertainties_cm1.tail(n - 1) = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  out.residual_rms_cm1 = std::sqrt(resid.cwiseAbs2().mean());
  for (const auto& r : rows) out.assignments.push_back({r.f, {r.i, r.j}});
  return out;
}

EnergyLadder reconstruct_ladder(const PeakSet& peaks, const Vector& predicted, double max_dev) {
  return reconstruct_ladder(std::vector<PeakSet>{peaks}, predicted, max_dev);
}

Spectrum autocorrelation_spectrum(const TimeSeries& series, Window window) {
  if (!series.amplitudes || series.amplitudes->empty()) {
    throw InvalidArgument("autocorrelation needs amplitude-level data; probability-only series given");
  }
  const auto& psi = *series.amplitudes;
  if (static_cast<Eigen::Index>(psi.size()) != series.times_fs.size()) {
    throw DimensionError("amplitude count does not match the time axis");
  }
  const double dt = uniform_step(series.times_fs);
  Vector corr(series.times_fs.size());
  for (std::size_t k = 0; k < psi.size(); ++k) corr(static_cast<Eigen::Index>(k)) = std::norm(psi.front().dot(psi[k]));
  Spectrum s = signal_spectrum(corr, dt, window);
  s.source = "autocorrelation";
  return s;
}

Vector relative_levels_cm1(const NuclearHamiltonian& h) {
  const Vector e = exact_diagonalize(h).eigenvalues;
  return (e.array() - e(0)).matrix() * units::kHartreeToWavenumber;
}

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s) {
  std::string out = "freq_cm1,amplitude\n";
  for (Eigen::Index k = 0; k < s.amplitudes.size(); ++k) {
    out += fmt::format("{:.15g},{:.15g}\n", s.frequencies_cm1(k), s.amplitudes(k));
  }
  csv::write_atomic(path, out);
}

Spectrum read_spectrum_csv(const std::filesystem::path& path) {
  const auto t = csv::read(path);
  const auto name = path.string();
  if (t.header != std::vector<std::string>{"freq_cm1", "amplitude"}) {
    throw InvalidArgument(fmt::format("{}:1: expected header freq_cm1,amplitude", name));
  }
  Spectrum s;
  const auto m = static_cast<Eigen::Index>(t.rows.size());
  s.frequencies_cm1.resize(m);
  s.amplitudes.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto& r = t.rows[static_cast<std::size_t>(k)];
    const auto line = t.line_numbers[static_cast<std::size_t>(k)];
    if (r.size() != 2) throw InvalidArgument(fmt::format("{}:{}: expected 2 fields", name, line));
    s.frequencies_cm1(k) = csv::to_double(r[0], name, line);
    s.amplitudes(k) = csv::to_double(r[1], name, line);
  }
  s.source = name;
  return s;
}

void write_peaks_csv(const std::filesystem::path& path, const PeakSet& p) {
  std::string out = "freq_cm1,amplitude,uncertainty_cm1\n";
  for (const auto& pk : p.peaks) {
    out += fmt::format("{:.12g},{:.12g},{:.12g}\n", pk.frequency_cm1, pk.amplitude, pk.uncertainty_cm1);
  }
  csv::write_atomic(path, out);
}

PeakSet read_peaks_csv(const std::filesystem::path& path) {
  const auto t = csv::read(path);
  const auto name = path.string();
  if (t.header != std::vector<std::string>{"freq_cm1", "amplitude", "uncertainty_cm1"}) {
    throw InvalidArgument(fmt::format("{}:1: expected header freq_cm1,amplitude,uncertainty_cm1", name));
  }
  PeakSet p;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& r = t.rows[k];
    const auto line = t.line_numbers[k];
    if (r.size() != 3) throw InvalidArgument(fmt::format("{}:{}: expected 3 fields", name, line));
    p.peaks.push_back({csv::to_double(r[0], name, line), csv::to_double(r[1], name, line),
                       csv::to_double(r[2], name, line)});
  }
  return p;
}

void write_ladder_csv(const std::filesystem::path& path, const EnergyLadder& l) {
  std::string out = "level_index,energy_cm1,uncertainty_cm1\n";
  for (Eigen::Index k = 0; k < l.levels_cm1.size(); ++k) {
    out += fmt::format("{},{:.12g},{:.12g}\n", k, l.levels_cm1(k), l.uncertainties_cm1(k));
  }
  csv::write_atomic(path, out);
}

EnergyLadder read_ladder_csv(const std::filesystem::path& path) {
  const auto t = csv::read(path);
  const auto name = path.string();
  if (t.header != std::vector<std::string>{"level_index", "energy_cm1", "uncertainty_cm1"}) {
    throw InvalidArgument(fmt::format("{}:1: expected header level_index,energy_cm1,uncertainty_cm1", name));
  }
  EnergyLadder l;
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  l.levels_cm1.resize(n);
  l.uncertainties_cm1.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& r = t.rows[static_cast<std::size_t>(k)];
    const auto line = t.line_numbers[static_cast<std::size_t>(k)];
    if (r.size() != 3) throw InvalidArgument(fmt::format("{}:{}: expected 3 fields", name, line));
    if (csv::to_integer(r[0], name, line) != k) {
      throw InvalidArgument(fmt::format("{}:{}: level_index out of sequence", name, line));
    }
    l.levels_cm1(k) = csv::to_double(r[1], name, line);
    l.uncertainties_cm1(k) = csv::to_double(r[2], name, line);
  }
  return l;
}

}  // namespace hbdyn
