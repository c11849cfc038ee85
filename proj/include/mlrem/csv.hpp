// Copyright 2026 The mlrem Authors
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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mlrem {

// Shortest representation that round-trips; "nan", "inf", "-inf" otherwise.
std::string format_double(double x);
double parse_double(const std::string& s);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws DomainError when the column is missing.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
  const std::string& at(std::size_t row, const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
  long long integer(std::size_t row, const std::string& name) const;
};

// Comma-delimited, header row first, fields quoted only when needed.
std::string to_csv(const CsvTable& t);
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

// Writes to a sibling temporary and renames over the target.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace mlrem
