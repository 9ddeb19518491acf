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
 * @file config.hpp
 * YAML run configuration for the hbdyn command-line tool.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hbdyn/dynamics.hpp"
#include "hbdyn/hamiltonian.hpp"
#include "hbdyn/simulator.hpp"
#include "hbdyn/spectrum.hpp"

namespace hbdyn::cli {

/// Invalid or unreadable configuration; mapped to exit code 2.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

inline constexpr const char* kBuiltinPotential = "builtin_dmanh";

struct RunConfig {
  int schema_version = 1;

  /// Cross-checked against the x column of a CSV potential when given.
  struct {
    bool specified = false;
    std::size_t n_points = 8;
    double x_min_bohr = -1.0;
    double x_max_bohr = 1.0;
  } grid;

  struct {
    double mass = units::kProtonMass;
    std::optional<double> sigma_bohr;  ///< default 2 * spacing
    int m_daf = 20;
  } kinetic;

  struct {
    std::string source = kBuiltinPotential;  ///< builtin_dmanh or a CSV path
    bool symmetrize = false;
  } potential;

  struct {
    double dt_fs = 0.5;
    std::size_t n_steps = 32768;
    Backend backend = Backend::oracle;
    RemapKind remap = RemapKind::exact_phase;
    bool use_ms = false;
    bool emit_programs = false;
  } dynamics;

  InitialStateSpec initial = init::Site{0};

  struct {
    bool enabled = false;
    NoiseModel model{};
  } noise;

  struct {
    Window window = Window::rectangular;
    double threshold_factor = 5.0;
    std::vector<std::size_t> sites;
    double max_deviation_cm1 = 0.0;
  } spectrum;

  struct {
    int points = 8;
    double t_au = 2000.0;
    int n_substeps = 40;
    int chi_max = 64;
    double tol = 1e-12;
  } mps;

  std::int64_t shots = 1000;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  /// Directory relative paths in the file are resolved against.
  std::filesystem::path base_dir = ".";
};

/// Parses YAML text; errors name `source` and the offending line.
RunConfig parse_config(const std::string& text, const std::string& source, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// "site:3", "two_site:1:6:3.14159", "eigenstate:0".
InitialStateSpec parse_initial(const std::string& text);

/// Hamiltonian selected by the configuration (builtin or CSV potential, optionally symmetrized).
NuclearHamiltonian build_from_config(const RunConfig& cfg);

}  // namespace hbdyn::cli
