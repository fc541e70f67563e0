#include "datadep/env.hpp"

#include <cstring>

extern char **environ;

namespace datadep {

env_map environment_snapshot() {
  env_map out;
  for (char **p = environ; p && *p; ++p) {
    const char *eq = std::strchr(*p, '=');
    if (!eq) continue;
    out.emplace(std::string(*p, eq), std::string(eq + 1));
  }
  return out;
}

std::optional<std::string> env_get(const env_map &env, std::string_view key) {
  auto it = env.find(key);
  if (it == env.end()) return std::nullopt;
  return it->second;
}

bool env_flag(const env_map &env, std::string_view key) {
  auto v = env_get(env, key);
  return v.has_value() && !v->empty();
}

}  // namespace datadep
