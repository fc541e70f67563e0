#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "datadep/http.hpp"

#include <cctype>
#include <fstream>

#include "httplib.h"

#include "datadep/errors.hpp"
#include "datadep/url.hpp"
#include "datadep/version.hpp"

namespace datadep {

namespace fs = std::filesystem;

std::optional<std::string> content_disposition_filename(std::string_view header_value) {
  std::size_t pos = 0;
  while (pos < header_value.size()) {
    std::size_t semi = header_value.find(';', pos);
    std::string_view part = header_value.substr(
        pos, semi == std::string_view::npos ? std::string_view::npos : semi - pos);
    pos = semi == std::string_view::npos ? header_value.size() : semi + 1;

    while (!part.empty() && (part.front() == ' ' || part.front() == '\t')) part.remove_prefix(1);

    std::size_t eq = part.find('=');
    if (eq == std::string_view::npos) continue;

    std::string key;
    for (char c : part.substr(0, eq)) key.push_back(static_cast<char>(std::tolower(
        static_cast<unsigned char>(c))));
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    if (key != "filename") continue;  // filename* (RFC 5987) is deliberately not handled

    std::string_view val = part.substr(eq + 1);
    while (!val.empty() && (val.front() == ' ' || val.front() == '\t')) val.remove_prefix(1);

    if (!val.empty() && val.front() == '"') {
      std::string out;
      for (std::size_t i = 1; i < val.size(); ++i) {
        if (val[i] == '"') return out;
        if (val[i] == '\\' && i + 1 < val.size()) {
          out.push_back(val[++i]);
          continue;
        }
        out.push_back(val[i]);
      }
      return std::nullopt;  // unterminated quoted-string
    }

    while (!val.empty() && (val.back() == ' ' || val.back() == '\t')) val.remove_suffix(1);
    if (val.empty()) return std::nullopt;
    return std::string(val);
  }
  return std::nullopt;
}

std::string sanitize_filename(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    if (c == '/' || c == '\\' || c == '\0')
      out.push_back('_');
    else
      out.push_back(c);
  }
  std::size_t first = out.find_first_not_of('.');
  out = first == std::string::npos ? std::string() : out.substr(first);
  if (out.empty()) return "download";
  return out;
}

std::string infer_filename(std::string_view url,
                           std::optional<std::string_view> content_disposition) {
  if (content_disposition) {
    if (auto name = content_disposition_filename(*content_disposition))
      return sanitize_filename(*name);
  }

  // Last non-empty path segment, with query/fragment stripped first.
  std::string path_store;
  std::string_view path;
  if (auto parsed = parse_http_url(url)) {
    path_store = parsed->path;
    path = path_store;
  } else {
    std::size_t frag = url.find('#');
    std::string_view no_frag = frag == std::string_view::npos ? url : url.substr(0, frag);
    std::size_t q = no_frag.find('?');
    path = q == std::string_view::npos ? no_frag : no_frag.substr(0, q);
  }

  while (!path.empty()) {
    std::size_t slash = path.rfind('/');
    std::string_view segment = slash == std::string_view::npos ? path : path.substr(slash + 1);
    if (!segment.empty()) return sanitize_filename(percent_decode(segment));
    if (slash == std::string_view::npos) break;
    path = path.substr(0, slash);
  }
  return "download";
}

namespace {

httplib::Client make_client(const url_parts &u, const http_options &opts) {
  httplib::Client cli(url_origin(u));
  cli.set_follow_location(false);  // redirects are handled by the caller
  cli.set_connection_timeout(opts.connect_timeout);
  cli.set_read_timeout(opts.read_timeout);
  cli.set_write_timeout(opts.read_timeout);
  cli.set_default_headers({{"User-Agent", std::string("datadep/") + version_string}});
  return cli;
}

bool is_redirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

}  // namespace

download_result fetch_to_dir(const remote_file &remote, const fs::path &dir,
                             const http_options &opts, const progress_fn &progress) {
  std::string current = remote.url;

  for (int hop = 0; hop <= opts.max_redirects; ++hop) {
    auto parsed = parse_http_url(current);
    if (!parsed) throw download_failed_error(remote.url, "malformed url: " + current);

    auto cli = make_client(*parsed, opts);

    int status = 0;
    bool redirected = false;
    bool bad_status = false;
    std::string location;
    std::string filename;
    fs::path part_path;
    std::ofstream out;
    std::uint64_t bytes = 0;
    std::string io_error;

    auto on_response = [&](const httplib::Response &resp) {
      status = resp.status;
      if (is_redirect(status) && resp.has_header("Location")) {
        redirected = true;
        location = resp.get_header_value("Location");
        return false;  // skip the body of the redirect response
      }
      if (status >= 400) {
        bad_status = true;
        return false;
      }
      if (remote.filename_override) {
        filename = *remote.filename_override;
      } else {
        std::optional<std::string_view> cd;
        std::string cd_value;
        if (resp.has_header("Content-Disposition")) {
          cd_value = resp.get_header_value("Content-Disposition");
          cd = cd_value;
        }
        filename = infer_filename(current, cd);
      }
      // A multi-file dependency can infer the same name twice; keep both.
      fs::path target = dir / filename;
      for (int n = 2; fs::exists(target) || fs::exists(target.string() + ".part"); ++n) {
        target = dir / (filename + "." + std::to_string(n));
      }
      filename = target.filename().string();
      part_path = target.string() + ".part";
      out.open(part_path, std::ios::binary | std::ios::trunc);
      if (!out) {
        io_error = "cannot open " + part_path.string();
        return false;
      }
      return true;
    };

    auto on_content = [&](const char *data, std::size_t len) {
      out.write(data, static_cast<std::streamsize>(len));
      if (!out) {
        io_error = "write failure on " + part_path.string();
        return false;
      }
      bytes += len;
      if (progress) progress(bytes);
      return true;
    };

    auto res = cli.Get(url_target(*parsed), on_response, on_content);

    if (redirected) {
      auto next = resolve_location(current, location);
      if (!next)
        throw download_failed_error(remote.url, "unresolvable redirect target '" + location + "'");
      current = *next;
      continue;
    }
    if (bad_status) throw download_failed_error(remote.url, "HTTP status " + std::to_string(status));
    if (!io_error.empty()) throw download_failed_error(remote.url, io_error);
    if (!res)
      throw download_failed_error(remote.url, httplib::to_string(res.error()));

    out.close();
    if (!out) throw download_failed_error(remote.url, "close failure on " + part_path.string());

    fs::path final_path = dir / filename;
    std::error_code ec;
    fs::rename(part_path, final_path, ec);
    if (ec)
      throw download_failed_error(remote.url,
                                  "rename to " + final_path.string() + ": " + ec.message());

    return download_result{final_path, bytes, current};
  }

  throw download_failed_error(remote.url,
                              "too many redirects (limit " + std::to_string(opts.max_redirects) + ")");
}

url_probe probe_url(const std::string &url, const http_options &opts) {
  std::string current = url;
  bool retried_as_get = false;

  for (int hop = 0; hop <= opts.max_redirects; ++hop) {
    auto parsed = parse_http_url(current);
    if (!parsed) return {false, 0, "malformed url: " + current};

    auto cli = make_client(*parsed, opts);

    httplib::Result res = retried_as_get
                              ? cli.Get(url_target(*parsed), {{"Range", "bytes=0-0"}})
                              : cli.Head(url_target(*parsed));
    if (!res) return {false, 0, httplib::to_string(res.error())};

    int status = res->status;
    if (is_redirect(status) && res->has_header("Location")) {
      auto next = resolve_location(current, res->get_header_value("Location"));
      if (!next) return {false, status, "unresolvable redirect"};
      current = *next;
      continue;
    }
    if ((status == 405 || status == 501) && !retried_as_get) {
      retried_as_get = true;
      --hop;  // the GET retry is not a redirect hop
      continue;
    }
    if (status >= 400) return {false, status, "HTTP status " + std::to_string(status)};
    return {true, status, ""};
  }
  return {false, 0, "too many redirects (limit " + std::to_string(opts.max_redirects) + ")"};
}

}  // namespace datadep
