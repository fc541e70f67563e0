#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "datadep/env.hpp"
#include "datadep/registry.hpp"

namespace datadep {

enum class accept_policy { interactive, always_accept, always_decline };

// DATADEP_ALWAYS_ACCEPT: "true" accepts everything, "false" declines everything,
// anything else (or unset) prompts.
accept_policy policy_from_env(const env_map &env);

struct prompt_io {
  std::istream *in = nullptr;    // answer source; may be null (treated as EOF)
  std::ostream *diag = nullptr;  // prompt text goes here, never to the data stream
  bool in_is_tty = false;
};

// Provenance prompt shown before any download: name, message, every source URL,
// destination, optional size hint, then the question. Control characters other
// than newline/tab are stripped so a hostile manifest cannot inject terminal
// escapes.
std::string render_prompt(const data_dep_spec &spec, const std::filesystem::path &dest,
                          std::optional<std::uint64_t> total_size_hint);

enum class consent { accept, decline };

// Interactive policy writes the prompt and reads one line; only "y"/"yes"
// (case-insensitive) accept. Empty line, EOF, read failure, or a non-tty input
// stream decline — the safe default for unattended runs.
consent ask(prompt_io &io, accept_policy policy, const std::string &rendered);

}  // namespace datadep
