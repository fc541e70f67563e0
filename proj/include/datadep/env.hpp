#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace datadep {

// Environment variables are passed around explicitly as a snapshot so that the
// path/resolution logic stays a pure function of its inputs.
using env_map = std::map<std::string, std::string, std::less<>>;

// Snapshot of the calling process's environment.
env_map environment_snapshot();

std::optional<std::string> env_get(const env_map &env, std::string_view key);

// True when the variable is present with a nonempty value.
bool env_flag(const env_map &env, std::string_view key);

// Names of every variable the library reacts to.
inline constexpr const char *env_load_path = "DATADEP_LOAD_PATH";
inline constexpr const char *env_store = "DATADEP_STORE";
inline constexpr const char *env_always_accept = "DATADEP_ALWAYS_ACCEPT";
inline constexpr const char *env_disable_download = "DATADEP_DISABLE_DOWNLOAD";

}  // namespace datadep
