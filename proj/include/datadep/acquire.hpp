#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "datadep/consent.hpp"
#include "datadep/env.hpp"
#include "datadep/http.hpp"
#include "datadep/locate.hpp"
#include "datadep/registry.hpp"

namespace datadep {

// Scratch directory where download, verification, and unpacking happen before
// the atomic rename into the store. Lives under <store>/.staging so the final
// rename never crosses filesystems, and is invisible to search.
struct staging_area {
  std::filesystem::path root;
  std::vector<std::filesystem::path> files;  // downloaded files, spec order
};

// Creates <store>/.staging/<name>-<12-hex-nonce>. Throws error(errc::io).
staging_area create_staging(const std::filesystem::path &store, std::string_view name);

// Best-effort removal of a staging root; never throws.
void discard_staging(const staging_area &staging) noexcept;

struct file_report {
  std::string url;
  std::string filename;
  std::uint64_t bytes = 0;
  std::string digest;  // lowercase hex, empty until computed
  int attempts = 0;
};

struct fetch_report {
  std::vector<file_report> files;
};

enum class verify_status { pass, fail, warned };

struct file_check {
  std::filesystem::path file;
  std::string computed;                 // lowercase hex
  std::optional<std::string> expected;  // enforce mode only
  bool matched = true;
};

struct verify_outcome {
  verify_status status = verify_status::pass;
  std::vector<file_check> files;
};

// Streams SHA-256 over each file. Enforce compares against the expected digests
// (case-insensitively); ignore/absent always come back `warned`, carrying the
// computed digests. Mismatch is a result, not an exception; unreadable files
// throw error(errc::io).
verify_outcome verify_checksum(const checksum_spec &spec,
                               const std::vector<std::filesystem::path> &files);

// Unpacks every staged file with a recognized archive suffix into the staging
// root; unpack_then_delete_archive removes each archive afterwards. Asking for
// unpacking when no staged file is an archive is an unsupported_format error.
void apply_post_fetch(post_fetch_action action, staging_area &staging);

// Atomic rename of the staging root onto final_dir. When final_dir appears
// concurrently (lost race), the staged copy is discarded and the existing
// directory is accepted. Throws install_failed_error.
void install(staging_area &&staging, const std::filesystem::path &final_dir);

struct resolve_options {
  prompt_io io;
  std::ostream *diag = nullptr;  // warnings/progress; may be null
  http_options http;
  bool progress = false;  // emit byte counts to diag while downloading
};

// The full access-by-name pipeline: search the load path; on a miss look the
// name up, get consent, download into staging, verify, post-fetch, and install
// atomically. Found-local short-circuits with no prompting and no network
// activity.
resolution resolve(const registry &reg, std::string_view name, const load_path &paths,
                   const env_map &env, resolve_options &opts);

}  // namespace datadep
