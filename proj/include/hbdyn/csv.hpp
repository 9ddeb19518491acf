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
 * @file csv.hpp
 * Minimal CSV reading plus atomic (temp-file + rename) text output.
 */
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hbdyn::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  ///< 1-based source line of each row
};

/// Parses comma-separated text with a mandatory header row. Blank lines are skipped.
Table parse(std::string_view text, const std::string& source_name = "<memory>");
Table read(const std::filesystem::path& path);

/// Parses a floating-point field; throws InvalidArgument naming source and line.
double to_double(const std::string& field, const std::string& source_name, std::size_t line);
long long to_integer(const std::string& field, const std::string& source_name, std::size_t line);

/// Writes `content` to `path` via a sibling temp file and rename.
void write_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_text(const std::filesystem::path& path);

}  // namespace hbdyn::csv
