#include "datadep/acquire.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <system_error>

#include "datadep/archive.hpp"
#include "datadep/errors.hpp"
#include "datadep/sha256.hpp"

namespace datadep {

namespace fs = std::filesystem;

namespace {

std::string random_nonce_hex12() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::uint64_t v = rng();
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(12, '0');
  for (int i = 0; i < 12; ++i) out[i] = digits[(v >> (4 * i)) & 0xf];
  return out;
}

std::string ascii_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

staging_area create_staging(const fs::path &store, std::string_view name) {
  fs::path staging_root = store / ".staging";
  std::error_code ec;
  fs::create_directories(staging_root, ec);
  if (ec) throw error(errc::io, "cannot create " + staging_root.string() + ": " + ec.message());

  for (int attempt = 0; attempt < 16; ++attempt) {
    fs::path dir = staging_root / (std::string(name) + "-" + random_nonce_hex12());
    if (fs::create_directory(dir, ec) && !ec) return staging_area{dir, {}};
  }
  throw error(errc::io, "cannot create a staging directory under " + staging_root.string());
}

void discard_staging(const staging_area &staging) noexcept {
  if (staging.root.empty()) return;
  std::error_code ec;
  fs::remove_all(staging.root, ec);
}

verify_outcome verify_checksum(const checksum_spec &spec, const std::vector<fs::path> &files) {
  verify_outcome outcome;

  for (std::size_t i = 0; i < files.size(); ++i) {
    file_check check;
    check.file = files[i];
    check.computed = sha256_file_hex(files[i]);
    if (spec.mode == checksum_mode::enforce) {
      check.expected = ascii_lower(spec.digests.at(i));
      check.matched = check.computed == *check.expected;
    }
    outcome.files.push_back(std::move(check));
  }

  if (spec.mode != checksum_mode::enforce) {
    outcome.status = verify_status::warned;
  } else {
    bool all_ok = std::all_of(outcome.files.begin(), outcome.files.end(),
                              [](const file_check &c) { return c.matched; });
    outcome.status = all_ok ? verify_status::pass : verify_status::fail;
  }
  return outcome;
}

void apply_post_fetch(post_fetch_action action, staging_area &staging) {
  if (action == post_fetch_action::none) return;

  std::vector<fs::path> archives;
  for (const auto &f : staging.files)
    if (is_archive_filename(f.filename().string())) archives.push_back(f);

  if (archives.empty())
    throw post_fetch_failed_error(staging.files.empty() ? "" : staging.files[0].filename().string(),
                                  post_fetch_failure::unsupported_format,
                                  "unpack requested but no downloaded file is a recognized archive");

  for (const auto &archive : archives) {
    unpack_archive(archive, staging.root);
    if (action == post_fetch_action::unpack_then_delete_archive) {
      std::error_code ec;
      fs::remove(archive, ec);
      if (ec)
        throw post_fetch_failed_error(archive.filename().string(), post_fetch_failure::io,
                                      "cannot delete archive: " + ec.message());
      std::erase(staging.files, archive);
    }
  }
}

void install(staging_area &&staging, const fs::path &final_dir) {
  std::error_code ec;

  if (fs::exists(final_dir, ec)) {  // a concurrent resolve won; accept its result
    discard_staging(staging);
    return;
  }

  fs::create_directories(final_dir.parent_path(), ec);
  fs::rename(staging.root, final_dir, ec);
  if (!ec) return;

  if (fs::exists(final_dir)) {  // lost the race between check and rename
    discard_staging(staging);
    return;
  }

  discard_staging(staging);
  throw install_failed_error("rename " + staging.root.string() + " -> " + final_dir.string() +
                             ": " + ec.message());
}

namespace {

void emit_digest_report(std::ostream *diag, const data_dep_spec &spec,
                        const verify_outcome &outcome) {
  if (!diag) return;
  *diag << "datadep: checksum for '" << spec.name << "' is "
        << (spec.checksum.mode == checksum_mode::ignore ? "ignored" : "not pinned")
        << "; computed digests:\n";
  for (const auto &check : outcome.files)
    *diag << "  " << check.computed << "  " << check.file.filename().string() << "\n";

  if (spec.checksum.mode == checksum_mode::absent) {
    *diag << "datadep: pin it by adding this line to the [[datadep]] entry:\n";
    if (outcome.files.size() == 1) {
      *diag << "  sha256 = \"" << outcome.files[0].computed << "\"\n";
    } else {
      *diag << "  sha256 = [";
      for (std::size_t i = 0; i < outcome.files.size(); ++i)
        *diag << (i ? ", " : "") << "\"" << outcome.files[i].computed << "\"";
      *diag << "]\n";
    }
  }
}

struct staged_download {
  fetch_report report;
};

// Downloads every remote source into the staging area, in spec order.
void download_all(const data_dep_spec &spec, staging_area &staging, const resolve_options &opts,
                  fetch_report &report) {
  http_options http = opts.http;
  if (spec.timeout) http.read_timeout = *spec.timeout;

  for (const auto &remote : spec.remote_sources) {
    progress_fn progress;
    if (opts.progress && opts.diag) {
      std::ostream *diag = opts.diag;
      std::string url = remote.url;
      progress = [diag, url, last = std::uint64_t(0)](std::uint64_t bytes) mutable {
        if (bytes - last < (1u << 20)) return;  // report every MiB
        last = bytes;
        *diag << "\rdatadep: " << url << ": " << (bytes >> 20) << " MiB";
        diag->flush();
      };
    }

    auto result = fetch_to_dir(remote, staging.root, http, progress);
    if (opts.progress && opts.diag) *opts.diag << "\n";

    staging.files.push_back(result.file);
    file_report fr;
    fr.url = remote.url;
    fr.filename = result.file.filename().string();
    fr.bytes = result.bytes;
    fr.attempts = 1;
    report.files.push_back(std::move(fr));
  }
}

}  // namespace

resolution resolve(const registry &reg, std::string_view name, const load_path &paths,
                   const env_map &env, resolve_options &opts) {
  // Already on disk: no prompt, no network, regardless of registration state.
  if (validate_name(name) == std::nullopt) {
    if (auto found = search(paths, name, opts.diag)) return *found;
  }

  const data_dep_spec *spec = reg.find(name);
  if (!spec) throw not_registered_error(std::string(name), reg.suggest(name));

  if (spec->kind == dep_kind::manual) {
    std::vector<fs::path> candidates;
    for (const auto &entry : paths.entries) candidates.push_back(entry.dir / spec->name);
    throw manual_missing_error(spec->name, spec->message, std::move(candidates));
  }

  if (env_flag(env, env_disable_download)) throw downloads_disabled_error(spec->name);

  fs::path dest = store_dir_candidate(paths, env) / spec->name;
  std::string prompt = render_prompt(*spec, dest, std::nullopt);
  if (ask(opts.io, policy_from_env(env), prompt) == consent::decline)
    throw declined_error(spec->name);

  fs::path store = ensure_store_dir(paths, env);
  staging_area staging = create_staging(store, spec->name);

  try {
    fetch_report report;
    download_all(*spec, staging, opts, report);

    auto outcome = verify_checksum(spec->checksum, staging.files);

    if (outcome.status == verify_status::fail) {
      // One retry for the files that failed, then give up.
      for (std::size_t i = 0; i < outcome.files.size(); ++i) {
        if (outcome.files[i].matched) continue;
        std::error_code ec;
        fs::remove(staging.files[i], ec);

        http_options http = opts.http;
        if (spec->timeout) http.read_timeout = *spec->timeout;
        auto retried = fetch_to_dir(spec->remote_sources[i], staging.root, http, {});
        staging.files[i] = retried.file;
        report.files[i].bytes = retried.bytes;
        report.files[i].filename = retried.file.filename().string();
        report.files[i].attempts += 1;
      }

      outcome = verify_checksum(spec->checksum, staging.files);
      if (outcome.status == verify_status::fail) {
        auto bad = std::find_if(outcome.files.begin(), outcome.files.end(),
                                [](const file_check &c) { return !c.matched; });
        throw checksum_mismatch_error(bad->file.filename().string(), *bad->expected,
                                      bad->computed);
      }
    }

    if (outcome.status == verify_status::warned) emit_digest_report(opts.diag, *spec, outcome);

    apply_post_fetch(spec->post_fetch, staging);

    fs::path final_dir = store / spec->name;
    install(std::move(staging), final_dir);
    return resolution{final_dir, resolution::via::fetched, std::nullopt};
  } catch (...) {
    discard_staging(staging);
    throw;
  }
}

}  // namespace datadep
