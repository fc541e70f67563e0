#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "datadep/registry.hpp"

namespace datadep {

struct http_options {
  std::chrono::seconds connect_timeout{10};
  std::chrono::seconds read_timeout{60};
  int max_redirects = 10;
};

// Filename precedence: Content-Disposition filename parameter, else the last
// non-empty URL path segment (query/fragment stripped, percent-decoded), else
// "download". The result is sanitized to one safe path segment.
std::string infer_filename(std::string_view url,
                           std::optional<std::string_view> content_disposition);

// The filename parameter of a Content-Disposition header value, quoted or bare.
std::optional<std::string> content_disposition_filename(std::string_view header_value);

// Replaces path separators and NUL with '_', strips leading dots; empty results
// become "download".
std::string sanitize_filename(std::string_view name);

struct download_result {
  std::filesystem::path file;
  std::uint64_t bytes = 0;
  std::string final_url;  // after redirects
};

using progress_fn = std::function<void(std::uint64_t bytes_so_far)>;

// GET with manual redirect following (≤ max_redirects). The body streams to
// <dir>/<filename>.part and is renamed to <dir>/<filename> on completion, so an
// interrupted transfer never looks like a finished file. Any status ≥ 400 fails.
// Throws download_failed_error.
download_result fetch_to_dir(const remote_file &remote, const std::filesystem::path &dir,
                             const http_options &opts, const progress_fn &progress = {});

struct url_probe {
  bool ok = false;
  int status = 0;      // 0 when no HTTP response was obtained
  std::string detail;  // human-readable cause when !ok
};

// Availability check for verify --remote: HEAD, falling back to a zero-length
// range GET when the server rejects HEAD (405/501). ok iff final status < 400.
url_probe probe_url(const std::string &url, const http_options &opts);

}  // namespace datadep
