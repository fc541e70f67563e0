#include "datadep/cli.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#ifndef _WIN32
#include <unistd.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"

#include "datadep/acquire.hpp"
#include "datadep/errors.hpp"
#include "datadep/manifest.hpp"
#include "datadep/sha256.hpp"
#include "datadep/version.hpp"

namespace datadep::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int exit_code_for(errc code) {
  switch (code) {
    case errc::declined: return exit_declined;
    case errc::checksum_mismatch: return exit_checksum_mismatch;
    case errc::not_registered: return exit_not_registered;
    case errc::downloads_disabled: return exit_downloads_disabled;
    case errc::manual_missing: return exit_manual_missing;
    case errc::usage: return exit_usage;
    default: return exit_failure;
  }
}

struct session {
  env_map env;
  fs::path cwd;
  load_path paths;
  fs::path manifest_path;

  std::optional<manifest> loaded;
  std::optional<registry> reg;

  // Loads the manifest on first use; prints every parse error on failure.
  bool load(std::ostream &err) {
    if (loaded) return true;
    auto result = load_manifest_file(manifest_path);
    if (!result.ok()) {
      err << "datadep: " << manifest_path.string() << ":\n";
      for (const auto &e : result.errors) err << "  " << e.to_string() << "\n";
      return false;
    }
    loaded = std::move(*result.value);
    reg = build_registry(*loaded);
    return true;
  }
};

bool stdin_is_tty() {
#ifdef _WIN32
  return false;
#else
  return ::isatty(STDIN_FILENO) == 1;
#endif
}

bool stderr_is_tty() {
#ifdef _WIN32
  return false;
#else
  return ::isatty(STDERR_FILENO) == 1;
#endif
}

resolve_options make_resolve_options() {
  resolve_options opts;
  opts.io.in = &std::cin;
  opts.io.diag = &std::cerr;
  opts.io.in_is_tty = stdin_is_tty();
  opts.diag = &std::cerr;
  opts.progress = stderr_is_tty();
  return opts;
}

int cmd_resolve(session &s, const std::string &name) {
  if (!s.load(std::cerr)) return exit_failure;
  auto opts = make_resolve_options();
  resolution res = resolve(*s.reg, name, s.paths, s.env, opts);
  std::cout << res.path.string() << "\n";
  return exit_ok;
}

int cmd_fetch(session &s, std::vector<std::string> names, bool all, bool keep_going) {
  if (!s.load(std::cerr)) return exit_failure;
  if (all) {
    names.clear();
    for (const auto &spec : s.reg->entries()) names.push_back(spec.name);
  }
  if (names.empty()) {
    std::cerr << "datadep: nothing to fetch (name some dependencies or pass --all)\n";
    return exit_usage;
  }

  int first_failure = exit_ok;
  for (const auto &name : names) {
    try {
      auto opts = make_resolve_options();
      resolution res = resolve(*s.reg, name, s.paths, s.env, opts);
      std::cout << res.path.string() << "\n";
    } catch (const error &e) {
      std::cerr << "datadep: " << e.what() << "\n";
      if (first_failure == exit_ok) first_failure = exit_code_for(e.code());
      if (!keep_going) return first_failure;
    }
  }
  return first_failure;
}

int cmd_list(session &s, bool as_json) {
  if (!s.load(std::cerr)) return exit_failure;
  for (const auto &spec : s.reg->entries()) {
    if (as_json) {
      json j = {{"name", spec.name},
                {"kind", to_string(spec.kind)},
                {"sources", spec.remote_sources.size()}};
      std::cout << j.dump() << "\n";
    } else {
      std::cout << spec.name << "\t" << to_string(spec.kind) << "\t"
                << spec.remote_sources.size() << "\n";
    }
  }
  return exit_ok;
}

int cmd_status(session &s, bool as_json) {
  if (!s.load(std::cerr)) return exit_failure;
  for (const auto &spec : s.reg->entries()) {
    auto found = search(s.paths, spec.name, &std::cerr);
    if (as_json) {
      json j = {{"name", spec.name}};
      if (found) {
        j["state"] = "found";
        j["origin"] = to_string(*found->origin);
        j["path"] = found->path.string();
      } else if (spec.kind == dep_kind::manual) {
        j["state"] = "manual";
        json locations = json::array();
        for (const auto &entry : s.paths.entries)
          locations.push_back((entry.dir / spec.name).string());
        j["locations"] = locations;
      } else {
        j["state"] = "not-fetched";
      }
      std::cout << j.dump() << "\n";
    } else {
      if (found) {
        std::cout << spec.name << "\tfound\t" << to_string(*found->origin) << "\t"
                  << found->path.string() << "\n";
      } else if (spec.kind == dep_kind::manual) {
        std::cout << spec.name << "\tmanual\tinstall into one of:";
        for (const auto &entry : s.paths.entries)
          std::cout << " " << (entry.dir / spec.name).string();
        std::cout << "\n";
      } else {
        std::cout << spec.name << "\tnot-fetched\n";
      }
    }
  }
  return exit_ok;
}

struct verify_totals {
  bool any_mismatch = false;
  bool any_failure = false;
};

void verify_local_dep(session &s, const data_dep_spec &spec, bool strict, bool as_json,
                      verify_totals &totals) {
  auto emit = [&](const std::string &state, json extra = json::object()) {
    if (as_json) {
      extra["name"] = spec.name;
      extra["state"] = state;
      std::cout << extra.dump() << "\n";
    }
  };

  auto found = search(s.paths, spec.name, &std::cerr);
  if (!found) {
    if (strict && spec.kind != dep_kind::manual) totals.any_failure = true;
    emit("not-fetched");
    if (!as_json) std::cout << "NOT-FETCHED\t" << spec.name << "\n";
    return;
  }

  if (spec.kind == dep_kind::manual || spec.checksum.mode != checksum_mode::enforce) {
    emit("ok", {{"note", "no pinned digests"}});
    if (!as_json) std::cout << "OK\t" << spec.name << "\t(no pinned digests)\n";
    return;
  }

  bool mismatch = false;
  bool unverifiable = false;
  json files = json::array();
  std::string detail;

  for (std::size_t i = 0; i < spec.remote_sources.size(); ++i) {
    const auto &src = spec.remote_sources[i];
    std::string fname =
        src.filename_override ? *src.filename_override : infer_filename(src.url, std::nullopt);
    fs::path file = found->path / fname;
    std::error_code ec;
    if (!fs::is_regular_file(file, ec)) {
      unverifiable = true;
      files.push_back({{"file", fname}, {"state", "missing"}});
      continue;
    }
    std::string computed = sha256_file_hex(file);
    if (computed == spec.checksum.digests[i]) {
      files.push_back({{"file", fname}, {"state", "ok"}});
    } else {
      mismatch = true;
      files.push_back({{"file", fname},
                       {"state", "mismatch"},
                       {"expected", spec.checksum.digests[i]},
                       {"computed", computed}});
      detail += " file=" + fname + " expected=" + spec.checksum.digests[i] +
                " computed=" + computed;
    }
  }

  if (mismatch) {
    totals.any_mismatch = true;
    emit("mismatch", {{"files", files}});
    if (!as_json) std::cout << "MISMATCH\t" << spec.name << detail << "\n";
  } else if (unverifiable) {
    emit("unverified", {{"files", files},
                        {"note", "archive not retained; digests were verified at fetch time"}});
    if (!as_json)
      std::cout << "UNVERIFIED\t" << spec.name
                << "\t(archive not retained; verified at fetch time)\n";
  } else {
    emit("ok", {{"files", files}});
    if (!as_json) std::cout << "OK\t" << spec.name << "\n";
  }
}

void verify_remote_dep(const data_dep_spec &spec, const http_options &http, bool as_json,
                       verify_totals &totals) {
  for (const auto &src : spec.remote_sources) {
    auto probe = probe_url(src.url, http);
    if (as_json) {
      json j = {{"name", spec.name},
                {"url", src.url},
                {"state", probe.ok ? "ok" : "decayed"},
                {"status", probe.status}};
      if (!probe.ok) j["detail"] = probe.detail;
      std::cout << j.dump() << "\n";
    } else {
      if (probe.ok)
        std::cout << "OK\t" << spec.name << "\t" << src.url << "\n";
      else
        std::cout << "DECAYED\t" << spec.name << "\t" << src.url << "\t(" << probe.detail << ")\n";
    }
    if (!probe.ok) totals.any_failure = true;
  }
}

int cmd_verify(session &s, std::vector<std::string> names, bool all, bool remote, bool strict,
               bool as_json) {
  if (!s.load(std::cerr)) return exit_failure;

  std::vector<const data_dep_spec *> specs;
  if (all || names.empty()) {
    for (const auto &spec : s.reg->entries()) specs.push_back(&spec);
  } else {
    for (const auto &name : names) {
      const auto *spec = s.reg->find(name);
      if (!spec) {
        auto hint = s.reg->suggest(name);
        std::cerr << "datadep: '" << name << "' is not registered"
                  << (hint ? " (did you mean '" + *hint + "'?)" : "") << "\n";
        return exit_not_registered;
      }
      specs.push_back(spec);
    }
  }

  verify_totals totals;
  http_options http;
  for (const auto *spec : specs) {
    if (remote)
      verify_remote_dep(*spec, http, as_json, totals);
    else
      verify_local_dep(s, *spec, strict, as_json, totals);
  }

  if (totals.any_mismatch) return exit_checksum_mismatch;
  if (totals.any_failure) return exit_failure;
  return exit_ok;
}

int cmd_remove(session &s, const std::string &name, bool gc) {
  if (gc) {
    fs::path store = store_dir_candidate(s.paths, s.env);
    fs::path staging = store / ".staging";
    std::error_code ec;
    auto now = fs::file_time_type::clock::now();
    int reaped = 0;
    for (fs::directory_iterator it(staging, ec), end; !ec && it != end; it.increment(ec)) {
      auto age = now - fs::last_write_time(it->path(), ec);
      if (ec) continue;
      if (age > std::chrono::hours(24)) {
        std::error_code rm;
        fs::remove_all(it->path(), rm);
        if (!rm) ++reaped;
      }
    }
    std::cerr << "datadep: removed " << reaped << " stale staging entr"
              << (reaped == 1 ? "y" : "ies") << "\n";
    return exit_ok;
  }

  // The name becomes a path component below; re-check it before deleting anything.
  if (auto bad = validate_name(name)) {
    std::cerr << "datadep: " << bad->to_string(name) << "\n";
    return exit_usage;
  }

  fs::path store = store_dir_candidate(s.paths, s.env);
  fs::path target = store / name;

  bool removed = false;
  std::error_code ec;
  if (fs::exists(target, ec)) {
    fs::remove_all(target, ec);
    if (ec) {
      std::cerr << "datadep: cannot remove " << target.string() << ": " << ec.message() << "\n";
      return exit_failure;
    }
    removed = true;
    std::cerr << "datadep: removed " << target.string() << "\n";
  }

  // Copies outside the writable store are reported, never deleted.
  bool shadowed = false;
  for (const auto &entry : s.paths.entries) {
    if (entry.dir == store) continue;
    fs::path other = entry.dir / name;
    std::error_code ec2;
    if (fs::is_directory(other, ec2) && fs::directory_iterator(other, ec2) != fs::directory_iterator()) {
      std::cerr << "datadep: '" << name << "' also present at " << other.string() << " ("
                << to_string(entry.origin) << "); not touching it\n";
      shadowed = true;
    }
  }

  if (!removed && !shadowed) std::cerr << "datadep: '" << name << "' is not fetched\n";
  return shadowed ? exit_failure : exit_ok;
}

}  // namespace

int run(int argc, char **argv) {
  CLI::App app{"data dependency manager"};
  app.set_version_flag("--version", std::string("datadep ") + version_string);

  std::string manifest_path = default_manifest_name;
  app.add_option("--manifest", manifest_path, "Manifest file (default: ./DataDeps.toml)");

  std::string name;
  std::vector<std::string> names;
  bool all = false, keep_going = false, as_json = false, remote = false, strict = false,
       gc = false;

  auto *resolve_cmd = app.add_subcommand("resolve", "Print the absolute path of a dependency, "
                                                    "fetching it first if needed");
  resolve_cmd->add_option("name", name, "Dependency name")->required();

  auto *fetch_cmd = app.add_subcommand("fetch", "Fetch dependencies eagerly");
  fetch_cmd->add_option("names", names, "Dependency names");
  fetch_cmd->add_flag("--all", all, "Fetch every dependency in the manifest");
  fetch_cmd->add_flag("--keep-going", keep_going, "Continue past failures");

  auto *list_cmd = app.add_subcommand("list", "List registered dependencies");
  list_cmd->add_flag("--json", as_json, "One JSON object per line");

  auto *status_cmd = app.add_subcommand("status", "Show which dependencies are present locally");
  status_cmd->add_flag("--json", as_json, "One JSON object per line");

  auto *verify_cmd = app.add_subcommand("verify", "Re-verify stored files or probe remote URLs");
  verify_cmd->add_option("names", names, "Dependency names (default: all)");
  verify_cmd->add_flag("--all", all, "Verify every dependency");
  verify_cmd->add_flag("--remote", remote, "Probe each source URL instead of local files");
  verify_cmd->add_flag("--strict", strict, "Treat not-fetched dependencies as failures");
  verify_cmd->add_flag("--json", as_json, "One JSON object per line");

  auto *remove_cmd = app.add_subcommand("remove", "Delete a fetched dependency from the store");
  remove_cmd->add_option("name", name, "Dependency name");
  remove_cmd->add_flag("--gc", gc, "Instead, reap staging directories older than 24h");

  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);  // CLI11 prints the message / help text
    return rc == 0 ? exit_ok : exit_usage;
  }

  session s;
  s.env = environment_snapshot();
  s.cwd = fs::current_path();
  s.paths = build_load_path(s.env, host_platform(), s.cwd);
  s.manifest_path = fs::absolute(manifest_path);

  try {
    if (resolve_cmd->parsed()) return cmd_resolve(s, name);
    if (fetch_cmd->parsed()) return cmd_fetch(s, names, all, keep_going);
    if (list_cmd->parsed()) return cmd_list(s, as_json);
    if (status_cmd->parsed()) return cmd_status(s, as_json);
    if (verify_cmd->parsed()) return cmd_verify(s, names, all, remote, strict, as_json);
    if (remove_cmd->parsed()) {
      if (!gc && name.empty()) {
        std::cerr << "datadep: remove needs a name or --gc\n";
        return exit_usage;
      }
      return cmd_remove(s, name, gc);
    }
  } catch (const error &e) {
    std::cerr << "datadep: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception &e) {
    std::cerr << "datadep: " << e.what() << "\n";
    return exit_failure;
  }
  return exit_usage;
}

}  // namespace datadep::cli
