#include "spi/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <vector>

namespace spi::toml {

namespace {

using nlohmann::json;

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  json run() {
    json root = json::object();
    json* table = &root;
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        table = &open_table(root);
      } else {
        parse_key_value(*table);
      }
      expect_line_end();
    }
    return root;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  std::set<std::string> defined_tables_;

  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  char get() {
    const char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(line_, col_, message);
  }

  void skip_inline_space() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) get();
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!at_end() && peek() != '\n') get();
    }
  }

  void skip_blank_lines() {
    while (!at_end()) {
      skip_inline_space();
      skip_comment();
      if (peek() == '\r' && peek(1) == '\n') get();
      if (peek() == '\n') {
        get();
      } else {
        break;
      }
    }
  }

  // Whitespace, newlines and comments, as allowed inside arrays.
  void skip_array_space() {
    while (!at_end()) {
      skip_inline_space();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        get();
      } else {
        break;
      }
    }
  }

  void expect_line_end() {
    skip_inline_space();
    skip_comment();
    if (at_end()) return;
    if (peek() == '\r' && peek(1) == '\n') get();
    if (peek() != '\n') fail("expected end of line");
    get();
  }

  static bool is_bare(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string parse_simple_key() {
    if (peek() == '"') return parse_basic_string();
    if (peek() == '\'') return parse_literal_string();
    std::string key;
    while (!at_end() && is_bare(peek())) key.push_back(get());
    if (key.empty()) fail("expected a key");
    return key;
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path;
    while (true) {
      skip_inline_space();
      path.push_back(parse_simple_key());
      skip_inline_space();
      if (peek() != '.') break;
      get();
    }
    return path;
  }

  static std::string join(const std::vector<std::string>& path) {
    std::string out;
    for (const auto& part : path) out += (out.empty() ? "" : ".") + part;
    return out;
  }

  json& open_table(json& root) {
    get();  // '['
    if (peek() == '[') fail("arrays of tables are not supported");
    const auto path = parse_key_path();
    if (peek() != ']') fail("expected ']' after table name");
    get();
    const std::string name = join(path);
    if (!defined_tables_.insert(name).second) fail("table [" + name + "] defined twice");
    json* node = &root;
    for (const auto& part : path) {
      if (node->contains(part) && !(*node)[part].is_object()) {
        fail("key '" + part + "' is already a value, not a table");
      }
      node = &(*node)[part];
      if (node->is_null()) *node = json::object();
    }
    return *node;
  }

  void parse_key_value(json& table) {
    const std::size_t key_line = line_;
    const std::size_t key_col = col_;
    const auto path = parse_key_path();
    if (peek() != '=') fail("expected '=' after key");
    get();
    skip_inline_space();
    json value = parse_value();

    json* node = &table;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      node = &(*node)[path[i]];
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) throw ParseError(key_line, key_col, "key conflicts with a value");
    }
    if (node->contains(path.back())) {
      throw ParseError(key_line, key_col, "duplicate key '" + join(path) + "'");
    }
    (*node)[path.back()] = std::move(value);
  }

  json parse_value() {
    const char c = peek();
    if (c == '"') {
      if (peek(1) == '"' && peek(2) == '"') fail("multi-line strings are not supported");
      return parse_basic_string();
    }
    if (c == '\'') return parse_literal_string();
    if (c == '[') return parse_array();
    if (c == '{') fail("inline tables are not supported");
    if (text_.substr(pos_).starts_with("true") && !is_bare(peek(4))) {
      for (int i = 0; i < 4; ++i) get();
      return true;
    }
    if (text_.substr(pos_).starts_with("false") && !is_bare(peek(5))) {
      for (int i = 0; i < 5; ++i) get();
      return false;
    }
    return parse_number();
  }

  std::string parse_basic_string() {
    get();  // opening quote
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (at_end()) fail("unterminated escape");
      const char e = get();
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case 'u': append_utf8(parse_hex(4), out); break;
        case 'U': append_utf8(parse_hex(8), out); break;
        default: fail(std::string("invalid escape '\\") + e + "'");
      }
    }
    return out;
  }

  std::uint32_t parse_hex(int digits) {
    std::uint32_t v = 0;
    for (int i = 0; i < digits; ++i) {
      const char c = at_end() ? '\0' : get();
      if (!std::isxdigit(static_cast<unsigned char>(c))) fail("invalid unicode escape");
      v = v * 16 + static_cast<std::uint32_t>(std::isdigit(static_cast<unsigned char>(c))
                                                  ? c - '0'
                                                  : std::tolower(c) - 'a' + 10);
    }
    return v;
  }

  static void append_utf8(std::uint32_t cp, std::string& out) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }

  std::string parse_literal_string() {
    get();
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == '\'') break;
      out.push_back(c);
    }
    return out;
  }

  json parse_array() {
    get();  // '['
    json arr = json::array();
    while (true) {
      skip_array_space();
      if (peek() == ']') {
        get();
        return arr;
      }
      arr.push_back(parse_value());
      skip_array_space();
      if (peek() == ',') {
        get();
      } else if (peek() == ']') {
        get();
        return arr;
      } else {
        fail("expected ',' or ']' in array");
      }
    }
  }

  json parse_number() {
    std::string token;
    while (!at_end() && (is_bare(peek()) || peek() == '.' || peek() == '+')) {
      const char c = get();
      if (c != '_') token.push_back(c);
    }
    if (token.empty()) fail("expected a value");
    std::string_view body = token;
    bool negative = false;
    if (body.front() == '+' || body.front() == '-') {
      negative = body.front() == '-';
      body.remove_prefix(1);
    }
    if (body == "inf") return negative ? -std::numeric_limits<double>::infinity()
                                       : std::numeric_limits<double>::infinity();
    if (body == "nan") return std::numeric_limits<double>::quiet_NaN();

    const bool is_float = body.find_first_of(".eE") != std::string_view::npos;
    if (!is_float) {
      std::int64_t v = 0;
      const auto res = std::from_chars(body.data(), body.data() + body.size(), v);
      if (res.ec != std::errc() || res.ptr != body.data() + body.size() ||
          (body.size() > 1 && body.front() == '0')) {
        fail("invalid value '" + token + "'");
      }
      if (negative) return -v;
      return static_cast<std::uint64_t>(v);
    }
    double v = 0.0;
    const auto res = std::from_chars(body.data(), body.data() + body.size(), v);
    if (res.ec != std::errc() || res.ptr != body.data() + body.size() || body.front() == '.' ||
        body.back() == '.') {
      fail("invalid value '" + token + "'");
    }
    return negative ? -v : v;
  }
};

}  // namespace

json parse(std::string_view text) { return Parser(text).run(); }

}  // namespace spi::toml
