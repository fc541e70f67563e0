#include "datadep/consent.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>

namespace datadep {

accept_policy policy_from_env(const env_map &env) {
  auto v = env_get(env, env_always_accept);
  if (!v) return accept_policy::interactive;
  if (*v == "true") return accept_policy::always_accept;
  if (*v == "false") return accept_policy::always_decline;
  return accept_policy::interactive;
}

namespace {

std::string strip_control(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if ((u < 0x20 && c != '\n' && c != '\t') || u == 0x7f) continue;
    out.push_back(c);
  }
  return out;
}

std::string human_bytes(std::uint64_t n) {
  const char *units[] = {"B", "KiB", "MiB", "GiB", "TiB"};
  double v = static_cast<double>(n);
  int u = 0;
  while (v >= 1024.0 && u < 4) {
    v /= 1024.0;
    ++u;
  }
  std::ostringstream os;
  os.precision(v < 10 && u > 0 ? 1 : 0);
  os << std::fixed << v << " " << units[u];
  return os.str();
}

// One prompt at a time per process so concurrent resolves cannot interleave text.
std::mutex prompt_mutex;

}  // namespace

std::string render_prompt(const data_dep_spec &spec, const std::filesystem::path &dest,
                          std::optional<std::uint64_t> total_size_hint) {
  std::ostringstream os;
  os << "Dependency: " << spec.name << "\n";
  os << spec.message << "\n";
  os << "Sources:\n";
  for (const auto &src : spec.remote_sources) os << "  " << src.url << "\n";
  os << "Destination: " << dest.string() << "\n";
  if (total_size_hint) os << "Approximate size: " << human_bytes(*total_size_hint) << "\n";
  os << "Download now? [y/N] ";
  return strip_control(os.str());
}

consent ask(prompt_io &io, accept_policy policy, const std::string &rendered) {
  if (policy == accept_policy::always_accept) return consent::accept;
  if (policy == accept_policy::always_decline) return consent::decline;

  std::lock_guard lock(prompt_mutex);

  if (!io.in || !io.in_is_tty) {
    if (io.diag)
      *io.diag << "datadep: stdin is not a terminal; declining download. "
                  "Set DATADEP_ALWAYS_ACCEPT=true to accept non-interactively.\n";
    return consent::decline;
  }

  if (io.diag) {
    *io.diag << rendered;
    io.diag->flush();
  }

  std::string line;
  if (!std::getline(*io.in, line)) return consent::decline;
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::string folded(line);
  std::transform(folded.begin(), folded.end(), folded.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return (folded == "y" || folded == "yes") ? consent::accept : consent::decline;
}

}  // namespace datadep
