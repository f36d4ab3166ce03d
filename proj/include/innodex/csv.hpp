// Copyright 2026 The innodex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace innodex::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column, or -1.
  int column(std::string_view name) const;
  /// Index of a header column; throws ConfigError when absent.
  int require_column(std::string_view name, std::string_view context) const;
};

/// RFC 4180-style parser: quoted fields, embedded commas/quotes/newlines, CRLF.
Table parse(std::string_view text);
Table read_file(const std::filesystem::path& path);

/// Quotes a field only when needed.
std::string escape(std::string_view field);
void write_row(std::ostream& os, std::span<const std::string> fields);
inline void write_row(std::ostream& os, std::initializer_list<std::string> fields) {
  write_row(os, std::span<const std::string>(fields.begin(), fields.size()));
}

/// Shortest round-trip decimal form (std::to_chars), locale-free.
std::string format_double(double v);
/// Parses a full-string double; throws DataError with context otherwise.
double parse_double(std::string_view text, std::string_view context);
long parse_long(std::string_view text, std::string_view context);
/// Empty string -> nullopt.
std::optional<double> parse_opt_double(std::string_view text, std::string_view context);

}  // namespace innodex::csv
