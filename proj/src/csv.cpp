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
#include "hbdyn/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "hbdyn/common.hpp"

namespace hbdyn::csv {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

Table parse(std::string_view text, const std::string& source_name) {
  Table table;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (trim(line).empty()) {
      if (eol == text.size()) break;
      continue;
    }
    auto fields = split(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != table.header.size()) {
        throw InvalidArgument(fmt::format("{}:{}: expected {} fields, found {}", source_name,
                                          line_no, table.header.size(), fields.size()));
      }
      table.rows.push_back(std::move(fields));
      table.line_numbers.push_back(line_no);
    }
    if (eol == text.size()) break;
  }
  if (!have_header) throw InvalidArgument(fmt::format("{}: missing header row", source_name));
  return table;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Table read(const std::filesystem::path& path) { return parse(read_text(path), path.string()); }

double to_double(const std::string& field, const std::string& source_name, std::size_t line) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw InvalidArgument(
        fmt::format("{}:{}: '{}' is not a number", source_name, line, field));
  }
  return value;
}

long long to_integer(const std::string& field, const std::string& source_name, std::size_t line) {
  long long value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw InvalidArgument(
        fmt::format("{}:{}: '{}' is not an integer", source_name, line, field));
  }
  return value;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument(fmt::format("cannot write '{}'", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InvalidArgument(fmt::format("short write to '{}'", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace hbdyn::csv
