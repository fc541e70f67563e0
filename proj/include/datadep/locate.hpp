#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "datadep/env.hpp"

namespace datadep {

enum class platform_kind { posix, windows };

platform_kind host_platform() noexcept;

enum class path_origin { env, working_dir, user_store, system_store };

const char *to_string(path_origin o) noexcept;

struct load_path_entry {
  std::filesystem::path dir;  // absolute; need not exist
  path_origin origin;

  bool operator==(const load_path_entry &) const = default;
};

// Ordered candidate storage directories; earlier entries shadow later ones.
struct load_path {
  std::vector<load_path_entry> entries;

  bool operator==(const load_path &) const = default;
};

struct resolution {
  std::filesystem::path path;
  enum class via { found_local, fetched } satisfied_by = via::found_local;
  std::optional<path_origin> origin;  // set when found locally
};

// Pure function of its inputs. Order: DATADEP_LOAD_PATH entries (split on the
// platform list separator, relative ones resolved against working_dir), then
// working_dir/datadeps, then the per-user data dir + /datadeps, then the
// system-wide dir. Entries whose base cannot be determined are omitted.
load_path build_load_path(const env_map &env, platform_kind platform,
                          const std::filesystem::path &working_dir);

// First entry whose <dir>/<name> is a non-empty directory wins. Performs no
// writes and no network activity; unreadable entries are skipped with a note on
// `diag` when provided.
std::optional<resolution> search(const load_path &paths, std::string_view name,
                                 std::ostream *diag = nullptr);

// Where a fetch would install: DATADEP_STORE if set, else the first user-store
// entry, else the first system-store entry. Pure — nothing is created.
// Throws no_writable_store_error only when there is no candidate at all.
std::filesystem::path store_dir_candidate(const load_path &paths, const env_map &env);

// Same selection as store_dir_candidate but creates the directory (and parents)
// and verifies writability, falling through the candidate list until one works.
// Throws no_writable_store_error listing every attempt.
std::filesystem::path ensure_store_dir(const load_path &paths, const env_map &env);

}  // namespace datadep
