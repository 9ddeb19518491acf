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
#include "hbdyn/gates.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <fmt/core.h>

namespace hbdyn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool angle_ok(double a) { return std::isfinite(a) && a >= -kPi && a <= kPi; }

Eigen::Matrix4cd cnot_matrix() {
  Eigen::Matrix4cd c = Eigen::Matrix4cd::Zero();
  c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1.0;
  return c;
}

}  // namespace

void apply_local(CMatrix& m, const LocalOperator& op, int nq) {
  const auto k = static_cast<int>(op.qubits.size());
  const Eigen::Index dim = m.rows();
  if (op.matrix.rows() != (Eigen::Index{1} << k) || dim != (Eigen::Index{1} << nq)) {
    throw DimensionError("apply_local: operator and state sizes disagree");
  }
  std::vector<int> shifts;
  for (int q : op.qubits) shifts.push_back(nq - 1 - q);
  Eigen::Index mask = 0;
  for (int s : shifts) mask |= Eigen::Index{1} << s;
  const int sub = 1 << k;
  std::vector<Eigen::Index> idx(sub);
  CMatrix block(sub, m.cols());
  for (Eigen::Index base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (int a = 0; a < sub; ++a) {
      Eigen::Index full = base;
      for (int b = 0; b < k; ++b) {
        if ((a >> (k - 1 - b)) & 1) full |= Eigen::Index{1} << shifts[b];
      }
      idx[a] = full;
      block.row(a) = m.row(full);
    }
    const CMatrix out = op.matrix * block;
    for (int a = 0; a < sub; ++a) m.row(idx[a]) = out.row(a);
  }
}

std::optional<LocalOperator> local_operator(const Gate& g) {
  return std::visit(
      overloaded{
          [](const gate::Rz& x) -> std::optional<LocalOperator> {
            return LocalOperator{rz_matrix(x.angle), {x.q}};
          },
          [](const gate::Ry& x) -> std::optional<LocalOperator> {
            return LocalOperator{ry_matrix(x.angle), {x.q}};
          },
          [](const gate::R& x) -> std::optional<LocalOperator> {
            return LocalOperator{r_matrix(x.theta, x.phi), {x.q}};
          },
          [](const gate::Cnot& x) -> std::optional<LocalOperator> {
            return LocalOperator{cnot_matrix(), {x.control, x.target}};
          },
          [](const gate::Ms& x) -> std::optional<LocalOperator> {
            return LocalOperator{ms_matrix(x.angle), {x.q1, x.q2}};
          },
          [](const auto&) -> std::optional<LocalOperator> { return std::nullopt; },
      },
      g);
}

double wrap_angle(double a, int* parity_flips) {
  const double r = std::remainder(a, 2.0 * kPi);
  if (parity_flips) {
    const auto shifts = static_cast<long long>(std::llround((a - r) / (2.0 * kPi)));
    *parity_flips = static_cast<int>(((shifts % 2) + 2) % 2);
  }
  return r;
}

Eigen::Matrix2cd rz_matrix(double a) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = std::polar(1.0, -a / 2);
  m(1, 1) = std::polar(1.0, a / 2);
  return m;
}

Eigen::Matrix2cd ry_matrix(double a) {
  Eigen::Matrix2cd m;
  const double c = std::cos(a / 2), s = std::sin(a / 2);
  m << c, -s, s, c;
  return m;
}

Eigen::Matrix2cd r_matrix(double theta, double phi) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  const cplx I(0.0, 1.0);
  Eigen::Matrix2cd m;
  m << c, -I * s * std::polar(1.0, -phi), -I * s * std::polar(1.0, phi), c;
  return m;
}

Eigen::Matrix4cd ms_matrix(double a) {
  const double c = std::cos(a / 2), s = std::sin(a / 2);
  const cplx mis(0.0, -s);
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  for (int k = 0; k < 4; ++k) {
    m(k, k) = c;
    m(k, 3 - k) = mis;
  }
  return m;
}

GateProgram::GateProgram(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > 16) {
    throw InvalidArgument(fmt::format("program qubit count {} out of range", n_qubits));
  }
  gates_.push_back(gate::PrepareAll{});
}

bool GateProgram::measured() const {
  return !gates_.empty() && std::holds_alternative<gate::MeasureAll>(gates_.back());
}

GateProgram& GateProgram::add(Gate g) {
  if (measured()) throw InvalidArgument("cannot append gates after measure_all");
  auto check_q = [this](int q) {
    if (q < 0 || q >= n_qubits_) {
      throw InvalidArgument(fmt::format("qubit {} out of range for {}-qubit program", q, n_qubits_));
    }
  };
  auto check_a = [](double a) {
    if (!angle_ok(a)) throw InvalidArgument(fmt::format("angle {} outside [-pi, pi]", a));
  };
  std::visit(overloaded{
                 [&](const gate::Rz& x) { check_q(x.q); check_a(x.angle); },
                 [&](const gate::Ry& x) { check_q(x.q); check_a(x.angle); },
                 [&](const gate::R& x) { check_q(x.q); check_a(x.theta); check_a(x.phi); },
                 [&](const gate::Cnot& x) {
                   check_q(x.control);
                   check_q(x.target);
                   if (x.control == x.target) throw InvalidArgument("cnot needs distinct qubits");
                 },
                 [&](const gate::Ms& x) {
                   check_q(x.q1);
                   check_q(x.q2);
                   check_a(x.angle);
                   if (x.q1 == x.q2) throw InvalidArgument("ms needs distinct qubits");
                 },
                 [&](const gate::GlobalPhase& x) { check_a(x.angle); },
                 [&](const gate::PrepareAll&) {
                   throw InvalidArgument("prepare_all may only appear first");
                 },
                 [](const gate::MeasureAll&) {},
             },
             g);
  gates_.push_back(g);
  return *this;
}

std::size_t GateProgram::count_cnot() const {
  std::size_t n = 0;
  for (const auto& g : gates_) n += std::holds_alternative<gate::Cnot>(g);
  return n;
}

std::size_t GateProgram::count_ms() const {
  std::size_t n = 0;
  for (const auto& g : gates_) n += std::holds_alternative<gate::Ms>(g);
  return n;
}

std::size_t GateProgram::count_rotations() const {
  std::size_t n = 0;
  for (const auto& g : gates_) {
    n += std::holds_alternative<gate::Rz>(g) || std::holds_alternative<gate::Ry>(g) ||
         std::holds_alternative<gate::R>(g);
  }
  return n;
}

void GateProgram::validate() const {
  if (gates_.empty() || !std::holds_alternative<gate::PrepareAll>(gates_.front())) {
    throw InvalidArgument("program must start with prepare_all");
  }
  GateProgram copy(n_qubits_);
  for (std::size_t k = 1; k < gates_.size(); ++k) copy.add(gates_[k]);
}

CMatrix compose(const GateProgram& program) {
  const int nq = program.n_qubits();
  CMatrix m = CMatrix::Identity(Eigen::Index{1} << nq, Eigen::Index{1} << nq);
  cplx phase = 1.0;
  for (const auto& g : program.gates()) {
    if (const auto op = local_operator(g)) {
      apply_local(m, *op, nq);
    } else if (const auto* p = std::get_if<gate::GlobalPhase>(&g)) {
      phase *= std::polar(1.0, p->angle);
    }
  }
  return phase * m;
}

double distance_up_to_phase(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("distance: shape mismatch");
  const cplx overlap = (b.adjoint() * a).trace();
  const cplx phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : cplx(1.0);
  return (a - phase * b).cwiseAbs().maxCoeff();
}

std::string format_angle(double a) {
  char buf[64];
  const double mag = std::abs(a);
  const bool fixed = a == 0.0 || (mag >= 1e-3 && mag <= 1e3);
  const auto res = std::to_chars(buf, buf + sizeof(buf), a,
                                 fixed ? std::chars_format::fixed : std::chars_format::scientific);
  std::string s(buf, res.ptr);
  if (s == "-0") s = "0";
  return s;
}

std::string emit_text(const GateProgram& program) {
  std::string out = fmt::format("version 1\nqubits {}\n---\n", program.n_qubits());
  for (const auto& g : program.gates()) {
    std::visit(overloaded{
                   [&](const gate::Rz& x) { out += fmt::format("rz {} {}\n", x.q, format_angle(x.angle)); },
                   [&](const gate::Ry& x) { out += fmt::format("ry {} {}\n", x.q, format_angle(x.angle)); },
                   [&](const gate::R& x) {
                     out += fmt::format("r {} {} {}\n", x.q, format_angle(x.theta), format_angle(x.phi));
                   },
                   [&](const gate::Cnot& x) { out += fmt::format("cnot {} {}\n", x.control, x.target); },
                   [&](const gate::Ms& x) {
                     out += fmt::format("ms {} {} {}\n", x.q1, x.q2, format_angle(x.angle));
                   },
                   [&](const gate::GlobalPhase& x) { out += fmt::format("gphase {}\n", format_angle(x.angle)); },
                   [&](const gate::PrepareAll&) { out += "prepare_all\n"; },
                   [&](const gate::MeasureAll&) { out += "measure_all\n"; },
               },
               g);
  }
  if (!program.measured()) out += "measure_all\n";
  return out;
}

namespace {

std::vector<std::string> tokens_of(std::string_view line) {
  std::vector<std::string> toks;
  std::istringstream ss{std::string(line)};
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

double parse_number(const std::string& tok, std::size_t line) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw InvalidArgument(fmt::format("line {}: '{}' is not a number", line, tok));
  }
  return v;
}

int parse_index(const std::string& tok, std::size_t line) {
  int v = 0;
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw InvalidArgument(fmt::format("line {}: '{}' is not an integer", line, tok));
  }
  return v;
}

}  // namespace

GateProgram parse_text(std::string_view text) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto toks = tokens_of(line);
    if (!toks.empty()) lines.emplace_back(line_no, std::move(toks));
  }
  auto expect = [&](std::size_t k, const char* what) -> const std::vector<std::string>& {
    if (k >= lines.size()) throw InvalidArgument(fmt::format("missing '{}' header line", what));
    return lines[k].second;
  };
  const auto& v = expect(0, "version");
  if (v.size() != 2 || v[0] != "version" || v[1] != "1") {
    throw InvalidArgument(fmt::format("line {}: expected 'version 1'", lines[0].first));
  }
  const auto& q = expect(1, "qubits");
  if (q.size() != 2 || q[0] != "qubits") {
    throw InvalidArgument(fmt::format("line {}: expected 'qubits <n>'", lines[1].first));
  }
  const int nq = parse_index(q[1], lines[1].first);
  const auto& sep = expect(2, "---");
  if (sep.size() != 1 || sep[0] != "---") {
    throw InvalidArgument(fmt::format("line {}: expected '---'", lines[2].first));
  }
  GateProgram program(nq);
  bool seen_prepare = false;
  for (std::size_t k = 3; k < lines.size(); ++k) {
    const auto [ln, t] = lines[k];
    auto need = [&, ln = ln, &t = t](std::size_t n) {
      if (t.size() != n + 1) {
        throw InvalidArgument(fmt::format("line {}: '{}' takes {} operand(s)", ln, t[0], n));
      }
    };
    try {
      const auto& op = t[0];
      if (op == "prepare_all") {
        need(0);
        if (seen_prepare || program.gates().size() != 1) {
          throw InvalidArgument("prepare_all must be the first instruction, exactly once");
        }
        seen_prepare = true;
        continue;
      }
      if (!seen_prepare) throw InvalidArgument("first instruction must be prepare_all");
      if (op == "rz") {
        need(2);
        program.add(gate::Rz{parse_index(t[1], ln), parse_number(t[2], ln)});
      } else if (op == "ry") {
        need(2);
        program.add(gate::Ry{parse_index(t[1], ln), parse_number(t[2], ln)});
      } else if (op == "r") {
        need(3);
        program.add(gate::R{parse_index(t[1], ln), parse_number(t[2], ln), parse_number(t[3], ln)});
      } else if (op == "cnot") {
        need(2);
        program.add(gate::Cnot{parse_index(t[1], ln), parse_index(t[2], ln)});
      } else if (op == "ms") {
        need(3);
        program.add(gate::Ms{parse_index(t[1], ln), parse_index(t[2], ln), parse_number(t[3], ln)});
      } else if (op == "gphase") {
        need(1);
        program.add(gate::GlobalPhase{parse_number(t[1], ln)});
      } else if (op == "measure_all") {
        need(0);
        program.measure_all();
      } else {
        throw InvalidArgument(fmt::format("unknown mnemonic '{}'", op));
      }
    } catch (const InvalidArgument& e) {
      const std::string msg = e.what();
      if (msg.rfind("line ", 0) == 0) throw;
      throw InvalidArgument(fmt::format("line {}: {}", ln, msg));
    }
  }
  if (!seen_prepare) throw InvalidArgument("program has no prepare_all");
  return program;
}

}  // namespace hbdyn
