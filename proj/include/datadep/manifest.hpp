#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "datadep/registry.hpp"

namespace datadep {

// One [[datadep]] table as authored. Keeps the structured provenance fields
// separate so the file round-trips; to_spec() folds them into the displayed
// message.
struct dep_decl {
  std::string name;
  std::string message;
  std::vector<std::string> urls;
  checksum_mode checksum = checksum_mode::absent;
  std::vector<std::string> sha256;      // enforce mode only, aligned with urls
  bool sha256_was_array = false;        // preserved so write round-trips exactly
  post_fetch_action post_fetch = post_fetch_action::none;
  bool manual = false;
  std::vector<std::string> filenames;   // empty, or aligned with urls
  bool filename_was_array = false;
  std::optional<std::int64_t> timeout_secs;
  std::optional<std::string> author;
  std::optional<std::string> license;
  std::optional<std::string> citation;
  std::optional<std::string> website;

  data_dep_spec to_spec() const;

  bool operator==(const dep_decl &) const = default;
};

struct manifest {
  int version = 1;
  std::vector<dep_decl> deps;

  bool operator==(const manifest &) const = default;
};

enum class manifest_error_kind {
  syntax,
  unknown_field,
  missing_field,
  invalid_value,
  duplicate_name,
  unsupported_version,
};

struct manifest_error {
  manifest_error_kind kind;
  int line = 0;
  std::string field;  // offending key, when one exists
  std::string message;

  std::string to_string() const;
};

struct manifest_parse_result {
  std::optional<manifest> value;  // set iff errors is empty
  std::vector<manifest_error> errors;

  bool ok() const { return value.has_value(); }
};

// Strict parse: unknown fields are errors, every error is collected (not just
// the first), and no input crashes or hangs the parser.
manifest_parse_result parse_manifest(std::string_view text);

// Canonical, deterministic rendering; parse_manifest(write_manifest(m))
// reconstructs a manifest equal to m.
std::string write_manifest(const manifest &m);

// Reads and parses; file-level IO problems are reported as a syntax error entry.
manifest_parse_result load_manifest_file(const std::filesystem::path &path);

// Builds the lookup registry from a parsed manifest. The parser has already
// enforced every registry invariant, so this cannot fail for a parse result.
registry build_registry(const manifest &m);

inline constexpr const char *default_manifest_name = "DataDeps.toml";

}  // namespace datadep
