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

#include "mcbf/cli/toml.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace mcbf::cli
{

namespace
{

std::string format_error(const std::string& source, int line, int column, const std::string& message)
{
  std::ostringstream os;
  os << source << ":" << line << ":" << column << ": " << message;
  return os.str();
}

class Parser
{
public:
  Parser(const std::string& text, const std::string& source) : text_(text), source_(source) {}

  TomlValue parse()
  {
    TomlValue root;
    root.line = 1;
    root.column = 1;
    TomlValue* current = &root;
    while (true)
    {
      skip_blank_lines();
      if (eof())
      {
        break;
      }
      if (peek() == '[')
      {
        current = parse_header(root);
      }
      else
      {
        parse_key_value(*current);
      }
      expect_line_end();
    }
    return root;
  }

private:
  [[noreturn]] void fail(const std::string& message) const { throw TomlError(source_, line_, column_, message); }

  bool eof() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }

  char advance()
  {
    const char c = text_[pos_++];
    if (c == '\n')
    {
      ++line_;
      column_ = 1;
    }
    else
    {
      ++column_;
    }
    return c;
  }

  void skip_spaces()
  {
    while (!eof() && (peek() == ' ' || peek() == '\t'))
    {
      advance();
    }
  }

  void skip_comment()
  {
    if (peek() == '#')
    {
      while (!eof() && peek() != '\n')
      {
        advance();
      }
    }
  }

  void skip_blank_lines()
  {
    while (!eof())
    {
      skip_spaces();
      skip_comment();
      if (peek() == '\r' && peek(1) == '\n')
      {
        advance();
      }
      if (peek() == '\n')
      {
        advance();
        continue;
      }
      break;
    }
  }

  // Whitespace, comments and newlines are all insignificant inside arrays.
  void skip_array_space()
  {
    while (!eof())
    {
      skip_spaces();
      skip_comment();
      if (peek() == '\n' || peek() == '\r')
      {
        advance();
        continue;
      }
      break;
    }
  }

  void expect_line_end()
  {
    skip_spaces();
    skip_comment();
    if (eof())
    {
      return;
    }
    if (peek() == '\r' && peek(1) == '\n')
    {
      advance();
    }
    if (peek() != '\n')
    {
      fail(std::string("expected end of line, found '") + peek() + "'");
    }
    advance();
  }

  std::string parse_key_part()
  {
    skip_spaces();
    if (peek() == '"')
    {
      return parse_string();
    }
    std::string key;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-'))
    {
      key += advance();
    }
    if (key.empty())
    {
      fail("expected a key");
    }
    return key;
  }

  std::vector<std::string> parse_dotted_key()
  {
    std::vector<std::string> parts{parse_key_part()};
    skip_spaces();
    while (peek() == '.')
    {
      advance();
      parts.push_back(parse_key_part());
      skip_spaces();
    }
    return parts;
  }

  TomlValue* descend(TomlValue& from, const std::vector<std::string>& path, std::size_t count, int line, int column)
  {
    TomlValue* node = &from;
    for (std::size_t i = 0; i < count; ++i)
    {
      TomlValue* next = node->find(path[i]);
      if (next == nullptr)
      {
        TomlValue t;
        t.line = line;
        t.column = column;
        node->table.emplace_back(path[i], std::move(t));
        next = &node->table.back().second;
      }
      if (next->kind == TomlValue::Kind::Array && !next->array.empty() &&
          next->array.back().kind == TomlValue::Kind::Table)
      {
        next = &next->array.back();
      }
      if (next->kind != TomlValue::Kind::Table)
      {
        fail("key '" + path[i] + "' is not a table");
      }
      node = next;
    }
    return node;
  }

  TomlValue* parse_header(TomlValue& root)
  {
    const int line = line_;
    const int column = column_;
    advance();
    const bool array_of_tables = peek() == '[';
    if (array_of_tables)
    {
      advance();
    }
    const std::vector<std::string> path = parse_dotted_key();
    if (peek() != ']')
    {
      fail("expected ']' to close the table header");
    }
    advance();
    if (array_of_tables)
    {
      if (peek() != ']')
      {
        fail("expected ']]' to close the array-of-tables header");
      }
      advance();
    }
    TomlValue* parent = descend(root, path, path.size() - 1, line, column);
    TomlValue* existing = parent->find(path.back());
    TomlValue t;
    t.line = line;
    t.column = column;
    if (array_of_tables)
    {
      if (existing == nullptr)
      {
        TomlValue arr;
        arr.kind = TomlValue::Kind::Array;
        arr.line = line;
        arr.column = column;
        parent->table.emplace_back(path.back(), std::move(arr));
        existing = &parent->table.back().second;
      }
      else if (existing->kind != TomlValue::Kind::Array)
      {
        fail("'" + path.back() + "' is already defined and is not an array of tables");
      }
      existing->array.push_back(std::move(t));
      return &existing->array.back();
    }
    if (existing != nullptr)
    {
      fail("table '" + path.back() + "' is defined twice");
    }
    parent->table.emplace_back(path.back(), std::move(t));
    return &parent->table.back().second;
  }

  void parse_key_value(TomlValue& table)
  {
    const int line = line_;
    const int column = column_;
    const std::vector<std::string> path = parse_dotted_key();
    if (peek() != '=')
    {
      fail("expected '=' after key");
    }
    advance();
    skip_spaces();
    TomlValue* parent = descend(table, path, path.size() - 1, line, column);
    if (parent->find(path.back()) != nullptr)
    {
      line_ = line;
      column_ = column;
      fail("duplicate key '" + path.back() + "'");
    }
    TomlValue v = parse_value();
    parent->table.emplace_back(path.back(), std::move(v));
  }

  TomlValue parse_value()
  {
    TomlValue v;
    v.line = line_;
    v.column = column_;
    const char c = peek();
    if (c == '"')
    {
      v.kind = TomlValue::Kind::String;
      v.string = parse_string();
    }
    else if (c == '[')
    {
      v.kind = TomlValue::Kind::Array;
      advance();
      skip_array_space();
      while (peek() != ']')
      {
        if (eof())
        {
          fail("unterminated array");
        }
        v.array.push_back(parse_value());
        skip_array_space();
        if (peek() == ',')
        {
          advance();
          skip_array_space();
        }
        else if (peek() != ']')
        {
          fail("expected ',' or ']' in array");
        }
      }
      advance();
    }
    else if (text_.compare(pos_, 4, "true") == 0 && !is_bare(peek(4)))
    {
      v.kind = TomlValue::Kind::Bool;
      v.boolean = true;
      for (int i = 0; i < 4; ++i)
      {
        advance();
      }
    }
    else if (text_.compare(pos_, 5, "false") == 0 && !is_bare(peek(5)))
    {
      v.kind = TomlValue::Kind::Bool;
      for (int i = 0; i < 5; ++i)
      {
        advance();
      }
    }
    else
    {
      v.kind = TomlValue::Kind::Number;
      parse_number(v);
    }
    return v;
  }

  static bool is_bare(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  void parse_number(TomlValue& v)
  {
    std::string token;
    while (!eof() && (is_bare(peek()) || peek() == '+' || peek() == '-' || peek() == '.'))
    {
      token += advance();
    }
    if (token.empty())
    {
      fail(std::string("unexpected character '") + (eof() ? ' ' : peek()) + "' where a value was expected");
    }
    std::string digits;
    for (char ch : token)
    {
      if (ch != '_')
      {
        digits += ch;
      }
    }
    std::string body = digits;
    bool negative = false;
    if (!body.empty() && (body[0] == '+' || body[0] == '-'))
    {
      negative = body[0] == '-';
      body.erase(0, 1);
    }
    if (body == "inf" || body == "nan")
    {
      v.number = body == "inf" ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
      v.number = negative ? -v.number : v.number;
      return;
    }
    const char* first = body.data();
    const char* last = body.data() + body.size();
    double value = 0.0;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last || body.empty() ||
        !std::isdigit(static_cast<unsigned char>(body[0])))
    {
      fail("invalid number '" + token + "'");
    }
    v.number = negative ? -value : value;
    v.integer = body.find_first_of(".eE") == std::string::npos;
  }

  std::string parse_string()
  {
    advance();
    std::string out;
    while (true)
    {
      if (eof() || peek() == '\n')
      {
        fail("unterminated string");
      }
      const char c = advance();
      if (c == '"')
      {
        break;
      }
      if (c == '\\')
      {
        if (eof())
        {
          fail("unterminated string");
        }
        const char e = advance();
        switch (e)
        {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(std::string("unsupported escape '\\") + e + "'");
        }
        continue;
      }
      out += c;
    }
    return out;
  }

  const std::string& text_;
  const std::string& source_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace

TomlError::TomlError(const std::string& source, int line, int column, const std::string& message)
  : std::runtime_error(format_error(source, line, column, message)), line_(line), column_(column)
{
}

const TomlValue* TomlValue::find(const std::string& key) const
{
  for (const auto& [k, v] : table)
  {
    if (k == key)
    {
      return &v;
    }
  }
  return nullptr;
}

TomlValue* TomlValue::find(const std::string& key)
{
  for (auto& [k, v] : table)
  {
    if (k == key)
    {
      return &v;
    }
  }
  return nullptr;
}

const char* to_string(TomlValue::Kind kind)
{
  switch (kind)
  {
  case TomlValue::Kind::Bool: return "boolean";
  case TomlValue::Kind::Number: return "number";
  case TomlValue::Kind::String: return "string";
  case TomlValue::Kind::Array: return "array";
  case TomlValue::Kind::Table: return "table";
  }
  return "unknown";
}

TomlValue parse_toml(const std::string& text, const std::string& source)
{
  return Parser(text, source).parse();
}

TomlValue parse_toml_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw std::runtime_error(path + ": cannot open file");
  }
  std::ostringstream os;
  os << in.rdbuf();
  return parse_toml(os.str(), path);
}

}  // namespace mcbf::cli
