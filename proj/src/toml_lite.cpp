#include "datadep/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <optional>

namespace datadep::toml_lite {

namespace {

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

struct cursor {
  std::string_view text;
  std::size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void skip_ws() {
    while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
  }
  bool at_comment_or_end() {
    skip_ws();
    return done() || peek() == '#';
  }
};

std::optional<std::string> scan_basic_string(cursor &c, std::string &err) {
  // caller consumed nothing; c.peek() == '"'
  ++c.pos;
  std::string out;
  while (!c.done()) {
    char ch = c.text[c.pos++];
    if (ch == '"') return out;
    if (ch == '\\') {
      if (c.done()) break;
      char esc = c.text[c.pos++];
      switch (esc) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case 'u': {
          if (c.pos + 4 > c.text.size()) {
            err = "truncated \\u escape";
            return std::nullopt;
          }
          unsigned code = 0;
          for (int i = 0; i < 4; ++i) {
            char h = c.text[c.pos++];
            int v = (h >= '0' && h <= '9')   ? h - '0'
                    : (h >= 'a' && h <= 'f') ? h - 'a' + 10
                    : (h >= 'A' && h <= 'F') ? h - 'A' + 10
                                             : -1;
            if (v < 0) {
              err = "malformed \\u escape";
              return std::nullopt;
            }
            code = code * 16 + static_cast<unsigned>(v);
          }
          // UTF-8 encode (basic multilingual plane only).
          if (code < 0x80) {
            out.push_back(static_cast<char>(code));
          } else if (code < 0x800) {
            out.push_back(static_cast<char>(0xc0 | (code >> 6)));
            out.push_back(static_cast<char>(0x80 | (code & 0x3f)));
          } else {
            out.push_back(static_cast<char>(0xe0 | (code >> 12)));
            out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3f)));
            out.push_back(static_cast<char>(0x80 | (code & 0x3f)));
          }
          break;
        }
        default:
          err = std::string("unsupported escape \\") + esc;
          return std::nullopt;
      }
      continue;
    }
    out.push_back(ch);
  }
  err = "unterminated string";
  return std::nullopt;
}

std::optional<value> scan_value(cursor &c, std::string &err) {
  c.skip_ws();
  if (c.done()) {
    err = "missing value";
    return std::nullopt;
  }

  char first = c.peek();

  if (first == '"') {
    auto s = scan_basic_string(c, err);
    if (!s) return std::nullopt;
    return value(std::move(*s));
  }

  if (first == '[') {
    ++c.pos;
    std::vector<std::string> items;
    bool expecting_value = true;
    while (true) {
      c.skip_ws();
      if (c.done()) {
        err = "unterminated array (arrays must close on the same line)";
        return std::nullopt;
      }
      if (c.peek() == ']') {
        ++c.pos;
        return value(std::move(items));
      }
      if (!expecting_value) {
        if (c.peek() != ',') {
          err = "expected ',' or ']' in array";
          return std::nullopt;
        }
        ++c.pos;
        expecting_value = true;
        continue;
      }
      if (c.peek() != '"') {
        err = "only string elements are supported in arrays";
        return std::nullopt;
      }
      auto s = scan_basic_string(c, err);
      if (!s) return std::nullopt;
      items.push_back(std::move(*s));
      expecting_value = false;
    }
  }

  if (std::string_view(c.text).substr(c.pos, 4) == "true" &&
      (c.pos + 4 == c.text.size() || !is_bare_key_char(c.text[c.pos + 4]))) {
    c.pos += 4;
    return value(true);
  }
  if (std::string_view(c.text).substr(c.pos, 5) == "false" &&
      (c.pos + 5 == c.text.size() || !is_bare_key_char(c.text[c.pos + 5]))) {
    c.pos += 5;
    return value(false);
  }

  if (first == '+' || first == '-' || std::isdigit(static_cast<unsigned char>(first))) {
    std::size_t start = c.pos;
    if (first == '+' || first == '-') ++c.pos;
    std::size_t digits_start = c.pos;
    while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek()))) ++c.pos;
    if (c.pos == digits_start) {
      err = "malformed number";
      return std::nullopt;
    }
    std::int64_t n = 0;
    auto sv = c.text.substr(start, c.pos - start);
    auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), n);
    if (ec != std::errc() || ptr != sv.data() + sv.size()) {
      err = "integer out of range";
      return std::nullopt;
    }
    return value(n);
  }

  err = "unrecognized value (expected string, integer, boolean, or string array)";
  return std::nullopt;
}

}  // namespace

parse_result parse(std::string_view text) {
  parse_result result;
  std::vector<item> *sink = &result.doc.root_items;
  std::vector<std::string> seen_keys;  // keys already used in the current table

  int line_no = 0;
  std::size_t offset = 0;
  while (offset <= text.size()) {
    if (offset == text.size() && line_no > 0) break;
    std::size_t newline = text.find('\n', offset);
    std::string_view line = text.substr(
        offset, newline == std::string_view::npos ? std::string_view::npos : newline - offset);
    offset = newline == std::string_view::npos ? text.size() + 1 : newline + 1;
    ++line_no;

    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    cursor c{line, 0};
    if (c.at_comment_or_end()) continue;

    // [[table]]
    if (c.peek() == '[') {
      if (line.substr(c.pos, 2) != "[[") {
        result.errors.push_back({line_no, "plain [table] headers are not part of the schema"});
        continue;
      }
      c.pos += 2;
      c.skip_ws();
      std::size_t key_start = c.pos;
      while (!c.done() && is_bare_key_char(c.peek())) ++c.pos;
      std::string name(line.substr(key_start, c.pos - key_start));
      c.skip_ws();
      if (name.empty() || c.done() || line.substr(c.pos, 2) != "]]") {
        result.errors.push_back({line_no, "malformed [[table]] header"});
        continue;
      }
      c.pos += 2;
      if (!c.at_comment_or_end()) {
        result.errors.push_back({line_no, "unexpected text after [[table]] header"});
        continue;
      }
      result.doc.tables.push_back({std::move(name), line_no, {}});
      sink = &result.doc.tables.back().items;
      seen_keys.clear();
      continue;
    }

    // key = value
    std::size_t key_start = c.pos;
    while (!c.done() && is_bare_key_char(c.peek())) ++c.pos;
    std::string key(line.substr(key_start, c.pos - key_start));
    if (key.empty()) {
      result.errors.push_back({line_no, "expected a key"});
      continue;
    }
    c.skip_ws();
    if (c.done() || c.peek() != '=') {
      result.errors.push_back({line_no, "expected '=' after key '" + key + "'"});
      continue;
    }
    ++c.pos;

    std::string err;
    auto val = scan_value(c, err);
    if (!val) {
      result.errors.push_back({line_no, "value for '" + key + "': " + err});
      continue;
    }
    if (!c.at_comment_or_end()) {
      result.errors.push_back({line_no, "unexpected trailing text after value for '" + key + "'"});
      continue;
    }

    bool duplicate = false;
    for (const auto &k : seen_keys)
      if (k == key) {
        result.errors.push_back({line_no, "duplicate key '" + key + "'"});
        duplicate = true;
        break;
      }
    if (duplicate) continue;
    seen_keys.push_back(key);

    sink->push_back({std::move(key), std::move(*val), line_no});
  }

  return result;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default: {
        auto u = static_cast<unsigned char>(ch);
        if (u < 0x20) {
          static constexpr char hex[] = "0123456789abcdef";
          out += "\\u00";
          out.push_back(hex[u >> 4]);
          out.push_back(hex[u & 0xf]);
        } else {
          out.push_back(ch);
        }
      }
    }
  }
  out.push_back('"');
  return out;
}

const char *type_name(const value &v) noexcept {
  switch (v.index()) {
    case 0: return "string";
    case 1: return "integer";
    case 2: return "boolean";
    case 3: return "string array";
  }
  return "?";
}

}  // namespace datadep::toml_lite
