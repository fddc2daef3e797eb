#pragma once

// Parser for the subset of TOML used by run configs: [tables] (dotted
// names allowed), bare or quoted keys, strings, integers, floats,
// booleans and arrays. Inline tables, dates and multi-line strings are
// rejected with a parse error.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace spi::toml {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                           ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Returns a JSON object; integers stay integers, floats stay floats.
nlohmann::json parse(std::string_view text);

}  // namespace spi::toml
