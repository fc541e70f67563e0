#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace datadep::toml_lite {

// Line-oriented parser for the TOML subset the manifest schema uses: bare keys,
// basic "..." strings, integers, booleans, single-line arrays of strings,
// [[array-of-table]] headers, and # comments. Everything else is a syntax error.
// Parsing is total: errors are collected per line and parsing continues on the
// next line, so callers see every problem at once.

using value = std::variant<std::string, std::int64_t, bool, std::vector<std::string>>;

struct item {
  std::string key;
  value val;
  int line = 0;
};

struct table {
  std::string name;
  int line = 0;
  std::vector<item> items;
};

struct diag {
  int line = 0;
  std::string message;
};

struct document {
  std::vector<item> root_items;
  std::vector<table> tables;
};

struct parse_result {
  document doc;
  std::vector<diag> errors;
  bool ok() const { return errors.empty(); }
};

parse_result parse(std::string_view text);

// Encodes a string as a TOML basic string, escaping as needed.
std::string quote(std::string_view s);

const char *type_name(const value &v) noexcept;

}  // namespace datadep::toml_lite
