#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace datadep {

// Failure classes surfaced by resolution; the CLI maps each to a stable exit code.
enum class errc {
  generic,
  usage,
  declined,
  checksum_mismatch,
  not_registered,
  downloads_disabled,
  manual_missing,
  download_failed,
  post_fetch_failed,
  install_failed,
  no_writable_store,
  config,
  io,
};

class error : public std::runtime_error {
 public:
  error(errc code, const std::string &msg) : std::runtime_error(msg), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

class not_registered_error : public error {
 public:
  not_registered_error(std::string name, std::optional<std::string> suggestion);
  std::string name;
  std::optional<std::string> suggestion;
};

class manual_missing_error : public error {
 public:
  manual_missing_error(std::string name, std::string provenance,
                       std::vector<std::filesystem::path> expected_locations);
  std::string name;
  std::string provenance;
  std::vector<std::filesystem::path> expected_locations;
};

class declined_error : public error {
 public:
  explicit declined_error(const std::string &name)
      : error(errc::declined, "download of '" + name + "' declined") {}
};

class download_failed_error : public error {
 public:
  download_failed_error(std::string url, const std::string &cause)
      : error(errc::download_failed, "download failed: " + url + ": " + cause),
        url(std::move(url)) {}
  std::string url;
};

class checksum_mismatch_error : public error {
 public:
  checksum_mismatch_error(std::string file, std::string expected, std::string computed);
  std::string file;
  std::string expected;
  std::string computed;
};

enum class post_fetch_failure {
  corrupt_archive,
  unsupported_format,
  path_traversal_entry,
  io,
};

const char *to_string(post_fetch_failure cause) noexcept;

class post_fetch_failed_error : public error {
 public:
  post_fetch_failed_error(std::string file, post_fetch_failure cause, const std::string &detail);
  std::string file;
  post_fetch_failure cause;
};

class install_failed_error : public error {
 public:
  explicit install_failed_error(const std::string &detail)
      : error(errc::install_failed, "install failed: " + detail) {}
};

class no_writable_store_error : public error {
 public:
  explicit no_writable_store_error(const std::string &attempts)
      : error(errc::no_writable_store, "no writable store directory: " + attempts) {}
};

class downloads_disabled_error : public error {
 public:
  explicit downloads_disabled_error(const std::string &name)
      : error(errc::downloads_disabled,
              "'" + name + "' is not present locally and DATADEP_DISABLE_DOWNLOAD is set") {}
};

}  // namespace datadep
