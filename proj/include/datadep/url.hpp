#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace datadep {

// Just enough URL handling for http(s) fetching: scheme://host[:port]/path?query#fragment.
struct url_parts {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;        // defaulted from the scheme when absent
  std::string path;    // always begins with '/', never empty
  std::string query;   // without '?', may be empty
};

// Parses an absolute http/https URL; nullopt for anything else.
std::optional<url_parts> parse_http_url(std::string_view url);

// "http://host:port" — what httplib wants as a client base.
std::string url_origin(const url_parts &u);

// Path plus query, the request target.
std::string url_target(const url_parts &u);

// Resolves a Location header value against the URL it came from. Handles
// absolute URLs, protocol-relative (//host/..), absolute paths, and relative
// paths. Returns nullopt when the result is not a usable http(s) URL.
std::optional<std::string> resolve_location(const std::string &base, std::string_view location);

// Decodes %XX sequences; malformed escapes are kept verbatim.
std::string percent_decode(std::string_view s);

}  // namespace datadep
