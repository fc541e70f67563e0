#include "datadep/url.hpp"

#include <cctype>

namespace datadep {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::optional<url_parts> parse_http_url(std::string_view url) {
  url_parts out;
  if (url.starts_with("http://")) {
    out.scheme = "http";
    out.port = 80;
    url.remove_prefix(7);
  } else if (url.starts_with("https://")) {
    out.scheme = "https";
    out.port = 443;
    url.remove_prefix(8);
  } else {
    return std::nullopt;
  }

  std::size_t authority_end = url.find_first_of("/?#");
  std::string_view authority = url.substr(0, authority_end);
  std::string_view rest = authority_end == std::string_view::npos ? "" : url.substr(authority_end);

  if (authority.empty()) return std::nullopt;
  if (authority.find('@') != std::string_view::npos) return std::nullopt;  // no userinfo

  std::size_t colon = authority.rfind(':');
  if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    std::string_view port_sv = authority.substr(colon + 1);
    if (port_sv.empty() || port_sv.size() > 5) return std::nullopt;
    int port = 0;
    for (char c : port_sv) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      port = port * 10 + (c - '0');
    }
    if (port == 0 || port > 65535) return std::nullopt;
    out.port = port;
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) return std::nullopt;
  out.host = std::string(authority);

  // Split the remainder into path, query; drop any fragment.
  std::size_t frag = rest.find('#');
  if (frag != std::string_view::npos) rest = rest.substr(0, frag);
  std::size_t q = rest.find('?');
  if (q != std::string_view::npos) {
    out.query = std::string(rest.substr(q + 1));
    rest = rest.substr(0, q);
  }
  out.path = rest.empty() ? "/" : std::string(rest);
  if (out.path[0] != '/') out.path.insert(out.path.begin(), '/');
  return out;
}

std::string url_origin(const url_parts &u) {
  bool default_port = (u.scheme == "http" && u.port == 80) || (u.scheme == "https" && u.port == 443);
  std::string origin = u.scheme + "://" + u.host;
  if (!default_port) origin += ":" + std::to_string(u.port);
  return origin;
}

std::string url_target(const url_parts &u) {
  return u.query.empty() ? u.path : u.path + "?" + u.query;
}

std::optional<std::string> resolve_location(const std::string &base, std::string_view location) {
  if (location.empty()) return std::nullopt;

  if (location.starts_with("http://") || location.starts_with("https://")) {
    if (!parse_http_url(location)) return std::nullopt;
    return std::string(location);
  }

  auto base_parts = parse_http_url(base);
  if (!base_parts) return std::nullopt;

  if (location.starts_with("//")) {
    std::string absolute = base_parts->scheme + ":" + std::string(location);
    if (!parse_http_url(absolute)) return std::nullopt;
    return absolute;
  }

  if (location[0] == '/') return url_origin(*base_parts) + std::string(location);

  // Relative path: resolve against the directory of the base path.
  std::string dir = base_parts->path.substr(0, base_parts->path.rfind('/') + 1);
  return url_origin(*base_parts) + dir + std::string(location);
}

std::string percent_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      int hi = hex_value(s[i + 1]);
      int lo = hex_value(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        continue;
      }
    }
    out.push_back(s[i]);
  }
  return out;
}

}  // namespace datadep
