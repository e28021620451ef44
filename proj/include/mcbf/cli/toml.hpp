// Copyright 2026 The mcbf Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mcbf::cli
{

/// Parse or schema error carrying a 1-based source position.
class TomlError : public std::runtime_error
{
public:
  TomlError(const std::string& source, int line, int column, const std::string& message);

  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

/// One node of a parsed document. Tables keep their keys in source order.
struct TomlValue
{
  enum class Kind
  {
    Bool,
    Number,
    String,
    Array,
    Table
  };

  Kind kind = Kind::Table;
  bool boolean = false;
  double number = 0.0;
  bool integer = false;
  std::string string;
  std::vector<TomlValue> array;
  std::vector<std::pair<std::string, TomlValue>> table;
  int line = 0;
  int column = 0;

  const TomlValue* find(const std::string& key) const;
  TomlValue* find(const std::string& key);
};

const char* to_string(TomlValue::Kind kind);

/// Reads the subset of TOML used by scenario files: comments, [table] and
/// [[array-of-tables]] headers with dotted names, bare or quoted keys, basic
/// strings, integers, floats (including inf/nan), booleans, and possibly
/// nested, multi-line arrays. `source` names the input in diagnostics.
TomlValue parse_toml(const std::string& text, const std::string& source = "<input>");

TomlValue parse_toml_file(const std::string& path);

}  // namespace mcbf::cli
