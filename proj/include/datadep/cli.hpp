#pragma once

namespace datadep::cli {

// Exit codes are part of the CLI contract.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_declined = 3;
inline constexpr int exit_checksum_mismatch = 4;
inline constexpr int exit_not_registered = 5;
inline constexpr int exit_downloads_disabled = 6;
inline constexpr int exit_manual_missing = 7;

int run(int argc, char **argv);

}  // namespace datadep::cli
