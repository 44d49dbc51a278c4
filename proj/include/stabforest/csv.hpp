// Copyright 2026 The stabforest Authors
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
#include <string>
#include <string_view>
#include <vector>

namespace stabforest {

/// Strips surrounding spaces, tabs and line breaks.
std::string trim(std::string_view s);

/// RFC 4180 style record splitting; quoted fields may contain commas and
/// doubled quotes but not embedded newlines. Unquoted fields are trimmed.
std::vector<std::string> split_csv_record(const std::string& line);

/// Quotes a field only when it would not survive split_csv_record as-is.
std::string csv_quote(const std::string& s);

/// Finite decimal number, optionally with a leading '+'.
std::optional<double> parse_double(const std::string& s);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

/// Comma separated list with each item trimmed.
std::vector<std::string> split_list(const std::string& s);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws Error when absent.
  std::size_t column(std::string_view name) const;
  std::optional<std::size_t> find_column(std::string_view name) const;
};

/// Reads a whole CSV file; blank lines are skipped and every record must
/// have as many fields as the header.
CsvTable read_csv_table(const std::filesystem::path& path);

}  // namespace stabforest
