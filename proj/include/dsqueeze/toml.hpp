#pragma once

#include <cctype>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "dsqueeze/errors.hpp"

namespace dsq::toml {

/// TOML subset used by run configs: [table] headers, bare keys, strings, numbers,
/// booleans and flat arrays of numbers or strings. Keys are flattened to "table.key".
using Array = std::vector<std::variant<double, std::string>>;
using Value = std::variant<bool, double, std::string, Array>;
using Table = std::map<std::string, Value>;

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline bool bare_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  return true;
}

class Cursor {
 public:
  Cursor(const std::string& s, int line) : s_(s), line_(line) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigurationError("config line " + std::to_string(line_) + ": " + msg);
  }
  void skip_ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
  }
  bool done() {
    skip_ws();
    return i_ >= s_.size() || s_[i_] == '#';
  }
  char peek() {
    skip_ws();
    return i_ < s_.size() ? s_[i_] : '\0';
  }

  std::string string() {
    ++i_;  // opening quote
    std::string out;
    while (i_ < s_.size() && s_[i_] != '"') {
      char c = s_[i_++];
      if (c == '\\') {
        if (i_ >= s_.size()) fail("unterminated escape");
        const char e = s_[i_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      }
      out += c;
    }
    if (i_ >= s_.size()) fail("unterminated string");
    ++i_;
    return out;
  }

  double number() {
    std::size_t j = i_;
    while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '+' ||
                             s_[j] == '-' || s_[j] == '.' || s_[j] == '_'))
      ++j;
    std::string tok = s_.substr(i_, j - i_);
    std::string clean;
    for (char c : tok)
      if (c != '_') clean += c;
    i_ = j;
    if (clean == "inf" || clean == "+inf") return std::numeric_limits<double>::infinity();
    if (clean == "-inf") return -std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double v = std::strtod(clean.c_str(), &end);
    if (clean.empty() || end != clean.c_str() + clean.size()) fail("invalid value '" + tok + "'");
    return v;
  }

  Value value() {
    const char c = peek();
    if (c == '"') return string();
    if (c == '[') {
      ++i_;
      Array arr;
      while (true) {
        const char p = peek();
        if (p == ']') {
          ++i_;
          break;
        }
        if (p == '"') {
          arr.emplace_back(string());
        } else if (p == '\0') {
          fail("unterminated array (arrays must fit on one line)");
        } else {
          arr.emplace_back(number());
        }
        const char q = peek();
        if (q == ',') {
          ++i_;
        } else if (q != ']') {
          fail("expected ',' or ']' in array");
        }
      }
      return arr;
    }
    if (s_.compare(i_, 4, "true") == 0) {
      i_ += 4;
      return true;
    }
    if (s_.compare(i_, 5, "false") == 0) {
      i_ += 5;
      return false;
    }
    return number();
  }

 private:
  const std::string& s_;
  int line_;
  std::size_t i_ = 0;
};

}  // namespace detail

inline Table parse(const std::string& text) {
  Table out;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = detail::trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (s[0] == '[') {
      const auto close = s.find(']');
      if (close == std::string::npos) throw ConfigurationError("config line " + std::to_string(line) + ": unterminated table header");
      section = detail::trim(s.substr(1, close - 1));
      if (!detail::bare_key(section)) throw ConfigurationError("config line " + std::to_string(line) + ": invalid table name");
      const std::string rest = detail::trim(s.substr(close + 1));
      if (!rest.empty() && rest[0] != '#') throw ConfigurationError("config line " + std::to_string(line) + ": trailing characters");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigurationError("config line " + std::to_string(line) + ": expected key = value");
    const std::string key = detail::trim(s.substr(0, eq));
    if (!detail::bare_key(key)) throw ConfigurationError("config line " + std::to_string(line) + ": invalid key '" + key + "'");
    const std::string rhs = s.substr(eq + 1);
    detail::Cursor cur(rhs, line);
    Value v = cur.value();
    if (!cur.done()) cur.fail("trailing characters after value");
    const std::string full = section.empty() ? key : section + "." + key;
    if (out.count(full)) cur.fail("duplicate key '" + full + "'");
    out[full] = std::move(v);
  }
  return out;
}

}  // namespace dsq::toml
