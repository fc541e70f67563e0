#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace datadep {

enum class dep_kind { managed, manual };

enum class post_fetch_action { none, unpack_auto, unpack_then_delete_archive };

// SHA-256 is the only implemented algorithm; the enum exists so declarations of
// anything else fail loudly at parse time instead of silently skipping checks.
enum class digest_algorithm { sha256 };

enum class checksum_mode { enforce, ignore, absent };

struct checksum_spec {
  digest_algorithm algorithm = digest_algorithm::sha256;
  checksum_mode mode = checksum_mode::absent;
  std::vector<std::string> digests;  // lowercase hex, one per remote file (enforce only)

  bool operator==(const checksum_spec &) const = default;
};

struct remote_file {
  std::string url;
  std::optional<std::string> filename_override;

  bool operator==(const remote_file &) const = default;
};

// One declared data dependency. `name` doubles as the on-disk directory name.
struct data_dep_spec {
  std::string name;
  std::string message;  // provenance text shown before download
  std::vector<remote_file> remote_sources;
  checksum_spec checksum;
  post_fetch_action post_fetch = post_fetch_action::none;
  dep_kind kind = dep_kind::managed;
  std::optional<std::chrono::seconds> timeout;  // per-request read timeout override

  bool operator==(const data_dep_spec &) const = default;
};

enum class name_error_kind { empty, illegal_char, too_long, reserved };

struct name_error {
  name_error_kind kind;
  std::size_t position = 0;  // byte index, meaningful for illegal_char

  std::string to_string(std::string_view name) const;
};

// A name is acceptable iff it is usable verbatim as one directory component on
// POSIX and Windows: first char [A-Za-z0-9_], rest [A-Za-z0-9_ .-], length 1..128,
// no separators, not "." or "..", no leading dot. Returns nullopt when valid.
std::optional<name_error> validate_name(std::string_view name);

// Violated DataDepSpec invariant, if any, described for error messages.
std::optional<std::string> spec_invariant_violation(const data_dep_spec &spec);

enum class registration_error_kind { duplicate_name, invalid_spec };

struct registration_error {
  registration_error_kind kind;
  std::string detail;
};

// Holds validated declarations and answers lookups by name. Mutation happens only
// while loading a manifest, before the registry is shared; afterwards it is
// read-only and safe for concurrent readers.
class registry {
 public:
  // Validates the spec (including name rules) and inserts it. Names differing
  // only by ASCII case are rejected as duplicates to avoid directory aliasing on
  // case-insensitive filesystems.
  std::optional<registration_error> add(data_dep_spec spec);

  const data_dep_spec *find(std::string_view name) const;

  // Nearest registered name within edit distance 2, for typo hints.
  std::optional<std::string> suggest(std::string_view name) const;

  std::span<const data_dep_spec> entries() const { return specs_; }
  std::size_t size() const { return specs_.size(); }

 private:
  std::vector<data_dep_spec> specs_;  // insertion order, drives listing
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Levenshtein distance, capped: returns min(distance, limit + 1).
std::size_t edit_distance_capped(std::string_view a, std::string_view b, std::size_t limit);

const char *to_string(dep_kind k) noexcept;
const char *to_string(post_fetch_action a) noexcept;
const char *to_string(checksum_mode m) noexcept;

}  // namespace datadep
