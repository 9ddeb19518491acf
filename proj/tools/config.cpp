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
#include "config.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include <fmt/core.h>
#include <yaml-cpp/yaml.h>

#include "hbdyn/csv.hpp"
#include "hbdyn/symmetry.hpp"

namespace hbdyn::cli {

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const {
    throw ConfigError(fmt::format("{}:{}: {}", source_, n.Mark().line + 1, msg));
  }

  void require_map(const YAML::Node& n, const std::string& where) const {
    if (!n.IsMap()) fail(n, fmt::format("'{}' must be a mapping", where));
  }

  void only_keys(const YAML::Node& n, const std::string& where, const std::set<std::string>& allowed) const {
    require_map(n, where);
    for (const auto& kv : n) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        fail(kv.first, fmt::format("unknown key '{}{}' (expected one of: {})",
                                   where.empty() ? "" : where + ".", key, list));
      }
    }
  }

  template <class T>
  void read(const YAML::Node& parent, const char* key, T& out, const std::string& where) const {
    const YAML::Node n = parent[key];
    if (!n) return;
    try {
      out = n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, fmt::format("'{}.{}' has the wrong type", where, key));
    }
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

void check_probability(const Reader& r, const YAML::Node& n, double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) r.fail(n, fmt::format("noise.{} = {} is outside [0, 1]", name, v));
}

}  // namespace

InitialStateSpec parse_initial(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  auto num = [&](std::size_t k) -> std::size_t {
    std::size_t v = 0;
    const std::string& f = parts.at(k);
    const auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || ec != std::errc{} || end != f.data() + f.size()) {
      throw ConfigError(fmt::format("initial state '{}': field {} is not a non-negative integer", text, k));
    }
    return v;
  };
  if (parts.size() == 2 && parts[0] == "site") return init::Site{num(1)};
  if (parts.size() == 2 && parts[0] == "eigenstate") return init::Eigenstate{num(1)};
  if (parts.size() == 4 && parts[0] == "two_site") {
    double phase = 0.0;
    try {
      phase = std::stod(parts[3]);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("initial state '{}': phase is not a number", text));
    }
    return init::TwoSite{num(1), num(2), phase};
  }
  throw ConfigError(fmt::format("initial state '{}' is not site:<i>, two_site:<i>:<j>:<phase> or eigenstate:<k>", text));
}

RunConfig parse_config(const std::string& text, const std::string& source, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("{}:{}: YAML syntax error: {}", source, e.mark.line + 1, e.msg));
  }
  const Reader r(source);
  RunConfig cfg;
  cfg.base_dir = base_dir;
  if (!root || root.IsNull()) throw ConfigError(fmt::format("{}: configuration is empty", source));
  r.only_keys(root, "", {"schema_version", "grid", "kinetic", "potential", "dynamics", "initial", "noise",
                         "spectrum", "mps", "shots", "seed", "output_dir"});
  if (!root["schema_version"]) throw ConfigError(fmt::format("{}: missing required key 'schema_version'", source));
  r.read(root, "schema_version", cfg.schema_version, "root");
  if (cfg.schema_version != 1) r.fail(root["schema_version"], fmt::format("unsupported schema_version {}", cfg.schema_version));

  if (const auto g = root["grid"]) {
    r.only_keys(g, "grid", {"n_points", "x_min_bohr", "x_max_bohr"});
    cfg.grid.specified = true;
    r.read(g, "n_points", cfg.grid.n_points, "grid");
    r.read(g, "x_min_bohr", cfg.grid.x_min_bohr, "grid");
    r.read(g, "x_max_bohr", cfg.grid.x_max_bohr, "grid");
    try {
      SpatialGrid(cfg.grid.n_points, cfg.grid.x_min_bohr, cfg.grid.x_max_bohr);
    } catch (const InvalidArgument& e) {
      r.fail(g, e.what());
    }
  }
  if (const auto k = root["kinetic"]) {
    r.only_keys(k, "kinetic", {"mass", "sigma_bohr", "m_daf"});
    r.read(k, "mass", cfg.kinetic.mass, "kinetic");
    r.read(k, "m_daf", cfg.kinetic.m_daf, "kinetic");
    if (k["sigma_bohr"]) {
      double s = 0.0;
      r.read(k, "sigma_bohr", s, "kinetic");
      cfg.kinetic.sigma_bohr = s;
    }
    DafKineticSpec spec{cfg.kinetic.mass, cfg.kinetic.sigma_bohr.value_or(1.0), cfg.kinetic.m_daf};
    try {
      spec.validate();
    } catch (const InvalidArgument& e) {
      r.fail(k, e.what());
    }
  }
  if (const auto p = root["potential"]) {
    r.only_keys(p, "potential", {"source", "symmetrize"});
    r.read(p, "source", cfg.potential.source, "potential");
    r.read(p, "symmetrize", cfg.potential.symmetrize, "potential");
    if (cfg.potential.source != kBuiltinPotential) {
      const auto path = base_dir / cfg.potential.source;
      if (!std::filesystem::exists(path)) {
        r.fail(p["source"], fmt::format("potential file '{}' does not exist", path.string()));
      }
    }
  }
  if (const auto d = root["dynamics"]) {
    r.only_keys(d, "dynamics", {"dt_fs", "n_steps", "backend", "remap_mode", "use_ms", "emit_programs"});
    r.read(d, "dt_fs", cfg.dynamics.dt_fs, "dynamics");
    r.read(d, "n_steps", cfg.dynamics.n_steps, "dynamics");
    r.read(d, "use_ms", cfg.dynamics.use_ms, "dynamics");
    r.read(d, "emit_programs", cfg.dynamics.emit_programs, "dynamics");
    try {
      if (d["backend"]) cfg.dynamics.backend = backend_from_string(d["backend"].as<std::string>());
      if (d["remap_mode"]) cfg.dynamics.remap = remap_from_string(d["remap_mode"].as<std::string>());
    } catch (const InvalidArgument& e) {
      r.fail(d, e.what());
    }
    if (!(cfg.dynamics.dt_fs > 0.0)) r.fail(d, "dynamics.dt_fs must be positive");
    if (cfg.dynamics.n_steps < 4) r.fail(d, "dynamics.n_steps must be at least 4");
  }
  if (const auto i = root["initial"]) {
    r.only_keys(i, "initial", {"variant", "params"});
    std::string variant = "site";
    r.read(i, "variant", variant, "initial");
    const YAML::Node params = i["params"];
    if (params) r.require_map(params, "initial.params");
    auto idx = [&](const char* key) -> std::size_t {
      if (!params || !params[key]) r.fail(i, fmt::format("initial.params.{} is required for variant '{}'", key, variant));
      std::size_t v = 0;
      r.read(params, key, v, "initial.params");
      return v;
    };
    if (variant == "site") {
      if (params) r.only_keys(params, "initial.params", {"index"});
      cfg.initial = init::Site{idx("index")};
    } else if (variant == "eigenstate") {
      if (params) r.only_keys(params, "initial.params", {"k"});
      cfg.initial = init::Eigenstate{idx("k")};
    } else if (variant == "two_site") {
      if (params) r.only_keys(params, "initial.params", {"i", "j", "phase"});
      double phase = 0.0;
      if (params) r.read(params, "phase", phase, "initial.params");
      cfg.initial = init::TwoSite{idx("i"), idx("j"), phase};
    } else {
      r.fail(i, fmt::format("unknown initial variant '{}' (site, two_site, eigenstate)", variant));
    }
  }
  if (const auto n = root["noise"]) {
    r.only_keys(n, "noise", {"enabled", "fidelity_1q", "fidelity_ms", "fidelity_cnot", "readout_flip"});
    r.read(n, "enabled", cfg.noise.enabled, "noise");
    r.read(n, "fidelity_1q", cfg.noise.model.fidelity_1q, "noise");
    r.read(n, "fidelity_ms", cfg.noise.model.fidelity_ms, "noise");
    r.read(n, "fidelity_cnot", cfg.noise.model.fidelity_cnot, "noise");
    r.read(n, "readout_flip", cfg.noise.model.readout_flip, "noise");
    check_probability(r, n, cfg.noise.model.fidelity_1q, "fidelity_1q");
    check_probability(r, n, cfg.noise.model.fidelity_ms, "fidelity_ms");
    check_probability(r, n, cfg.noise.model.fidelity_cnot, "fidelity_cnot");
    check_probability(r, n, cfg.noise.model.readout_flip, "readout_flip");
  }
  if (const auto s = root["spectrum"]) {
    r.only_keys(s, "spectrum", {"window", "threshold_factor", "sites", "max_deviation_cm1"});
    try {
      if (s["window"]) cfg.spectrum.window = window_from_string(s["window"].as<std::string>());
    } catch (const InvalidArgument& e) {
      r.fail(s["window"], e.what());
    }
    r.read(s, "threshold_factor", cfg.spectrum.threshold_factor, "spectrum");
    r.read(s, "sites", cfg.spectrum.sites, "spectrum");
    r.read(s, "max_deviation_cm1", cfg.spectrum.max_deviation_cm1, "spectrum");
    if (!(cfg.spectrum.threshold_factor > 0.0)) r.fail(s, "spectrum.threshold_factor must be positive");
  }
  if (const auto m = root["mps"]) {
    r.only_keys(m, "mps", {"points", "t_au", "n_substeps", "chi_max", "tol"});
    r.read(m, "points", cfg.mps.points, "mps");
    r.read(m, "t_au", cfg.mps.t_au, "mps");
    r.read(m, "n_substeps", cfg.mps.n_substeps, "mps");
    r.read(m, "chi_max", cfg.mps.chi_max, "mps");
    r.read(m, "tol", cfg.mps.tol, "mps");
    if (cfg.mps.chi_max < 1) r.fail(m, "mps.chi_max must be >= 1");
    if (cfg.mps.n_substeps < 1) r.fail(m, "mps.n_substeps must be >= 1");
  }
  r.read(root, "shots", cfg.shots, "root");
  r.read(root, "seed", cfg.seed, "root");
  if (root["output_dir"]) {
    std::string dir;
    r.read(root, "output_dir", dir, "root");
    cfg.output_dir = base_dir / dir;
  }
  if (cfg.shots <= 0) r.fail(root["shots"], "shots must be positive");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError(fmt::format("config file '{}' does not exist", path.string()));
  const std::string text = csv::read_text(path);
  return parse_config(text, path.string(), path.parent_path().empty() ? "." : path.parent_path());
}

NuclearHamiltonian build_from_config(const RunConfig& cfg) {
  NuclearHamiltonian h = [&] {
    if (cfg.potential.source == kBuiltinPotential) return load_builtin_dmanh();
    const auto loaded = load_potential_csv(cfg.base_dir / cfg.potential.source);
    if (cfg.grid.specified) {
      const SpatialGrid want(cfg.grid.n_points, cfg.grid.x_min_bohr, cfg.grid.x_max_bohr);
      const auto& got = loaded.grid;
      if (got.n_points() != want.n_points() || std::abs(got.x_min() - want.x_min()) > 1e-9 ||
          std::abs(got.x_max() - want.x_max()) > 1e-9) {
        throw ConfigError(fmt::format("grid section ({} points on [{}, {}]) disagrees with potential file ({} points on [{}, {}])",
                                      want.n_points(), want.x_min(), want.x_max(), got.n_points(), got.x_min(), got.x_max()));
      }
    }
    DafKineticSpec spec = DafKineticSpec::defaults_for(loaded.grid, cfg.kinetic.mass);
    spec.m_daf = cfg.kinetic.m_daf;
    if (cfg.kinetic.sigma_bohr) spec.sigma = *cfg.kinetic.sigma_bohr;
    return build_hamiltonian(loaded.grid, loaded.potential, spec);
  }();
  return cfg.potential.symmetrize ? reflection_symmetrize(h) : h;
}

}  // namespace hbdyn::cli
