#include "datadep/locate.hpp"

#include <system_error>

#ifdef _WIN32
#include <io.h>
#else
#include <unistd.h>
#endif

#include "datadep/errors.hpp"

namespace datadep {

namespace fs = std::filesystem;

platform_kind host_platform() noexcept {
#ifdef _WIN32
  return platform_kind::windows;
#else
  return platform_kind::posix;
#endif
}

const char *to_string(path_origin o) noexcept {
  switch (o) {
    case path_origin::env: return "env";
    case path_origin::working_dir: return "working-dir";
    case path_origin::user_store: return "user-store";
    case path_origin::system_store: return "system-store";
  }
  return "?";
}

namespace {

fs::path absolutize(fs::path p, const fs::path &working_dir) {
  if (!p.is_absolute()) p = working_dir / p;
  return p.lexically_normal();
}

// Home-derived bases are used only when absolute; a relative HOME or
// XDG_DATA_HOME counts as indeterminable and the entry is omitted.
std::optional<fs::path> user_data_dir(const env_map &env, platform_kind platform) {
  if (platform == platform_kind::windows) {
    if (auto v = env_get(env, "LOCALAPPDATA"); v && fs::path(*v).is_absolute())
      return fs::path(*v);
    return std::nullopt;
  }
  if (auto v = env_get(env, "XDG_DATA_HOME"); v && !v->empty() && fs::path(*v).is_absolute())
    return fs::path(*v);
  if (auto v = env_get(env, "HOME"); v && !v->empty() && fs::path(*v).is_absolute())
    return fs::path(*v) / ".local" / "share";
  return std::nullopt;
}

std::optional<fs::path> system_data_dir(const env_map &env, platform_kind platform) {
  if (platform == platform_kind::windows) {
    if (auto v = env_get(env, "PROGRAMDATA"); v && fs::path(*v).is_absolute())
      return fs::path(*v);
    return std::nullopt;
  }
  return fs::path("/usr/share");
}

bool dir_writable(const fs::path &dir) {
#ifdef _WIN32
  return _access(dir.string().c_str(), 2) == 0;
#else
  return ::access(dir.c_str(), W_OK | X_OK) == 0;
#endif
}

}  // namespace

load_path build_load_path(const env_map &env, platform_kind platform,
                          const fs::path &working_dir) {
  load_path out;
  const char sep = platform == platform_kind::windows ? ';' : ':';

  if (auto raw = env_get(env, env_load_path)) {
    std::string_view rest = *raw;
    while (!rest.empty()) {
      std::size_t cut = rest.find(sep);
      std::string_view piece = rest.substr(0, cut);
      rest = cut == std::string_view::npos ? std::string_view{} : rest.substr(cut + 1);
      if (piece.empty()) continue;  // empty path-list segments are dropped
      out.entries.push_back({absolutize(fs::path(piece), working_dir), path_origin::env});
    }
  }

  out.entries.push_back(
      {absolutize(working_dir / "datadeps", working_dir), path_origin::working_dir});

  if (auto base = user_data_dir(env, platform))
    out.entries.push_back({(*base / "datadeps").lexically_normal(), path_origin::user_store});

  if (auto base = system_data_dir(env, platform))
    out.entries.push_back({(*base / "datadeps").lexically_normal(), path_origin::system_store});

  return out;
}

std::optional<resolution> search(const load_path &paths, std::string_view name,
                                 std::ostream *diag) {
  for (const auto &entry : paths.entries) {
    fs::path candidate = entry.dir / name;
    std::error_code ec;
    if (!fs::is_directory(candidate, ec)) continue;

    fs::directory_iterator it(candidate, ec);
    if (ec) {
      if (diag)
        *diag << "datadep: skipping unreadable " << candidate.string() << " (" << ec.message()
              << ")\n";
      continue;
    }
    if (it == fs::directory_iterator()) continue;  // empty dir never masks a fetch

    return resolution{candidate, resolution::via::found_local, entry.origin};
  }
  return std::nullopt;
}

namespace {

std::vector<fs::path> store_candidates(const load_path &paths, const env_map &env) {
  std::vector<fs::path> candidates;
  if (auto forced = env_get(env, env_store); forced && !forced->empty()) {
    candidates.push_back(fs::absolute(fs::path(*forced)).lexically_normal());
    return candidates;  // explicit config never falls back silently
  }
  for (auto origin : {path_origin::user_store, path_origin::system_store})
    for (const auto &entry : paths.entries)
      if (entry.origin == origin) candidates.push_back(entry.dir);
  return candidates;
}

}  // namespace

fs::path store_dir_candidate(const load_path &paths, const env_map &env) {
  auto candidates = store_candidates(paths, env);
  if (candidates.empty())
    throw no_writable_store_error("no store candidates (no home directory and no DATADEP_STORE)");
  return candidates.front();
}

fs::path ensure_store_dir(const load_path &paths, const env_map &env) {
  auto candidates = store_candidates(paths, env);
  std::string attempts;
  for (const auto &dir : candidates) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!ec && fs::is_directory(dir, ec) && dir_writable(dir)) return dir;
    attempts += "\n  " + dir.string() + ": " + (ec ? ec.message() : "not writable");
  }
  if (attempts.empty()) attempts = " no candidates (no home directory and no DATADEP_STORE)";
  throw no_writable_store_error(attempts);
}

}  // namespace datadep
