#include "datadep/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "datadep/errors.hpp"
#include "datadep/toml_lite.hpp"
#include "datadep/url.hpp"

namespace datadep {

namespace {

using toml_lite::value;

std::string ascii_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_sha256_hex(std::string_view s) {
  return s.size() == 64 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
         });
}

struct dep_reader {
  const toml_lite::table &tbl;
  std::vector<manifest_error> &errors;

  const toml_lite::item *get(std::string_view key) const {
    for (const auto &it : tbl.items)
      if (it.key == key) return &it;
    return nullptr;
  }

  void error(manifest_error_kind kind, int line, std::string field, std::string msg) {
    errors.push_back({kind, line, std::move(field), std::move(msg)});
  }

  std::optional<std::string> want_string(std::string_view key, bool required) {
    const auto *it = get(key);
    if (!it) {
      if (required)
        error(manifest_error_kind::missing_field, tbl.line, std::string(key),
              "required field '" + std::string(key) + "' is missing");
      return std::nullopt;
    }
    if (const auto *s = std::get_if<std::string>(&it->val)) return *s;
    error(manifest_error_kind::invalid_value, it->line, std::string(key),
          "'" + std::string(key) + "' must be a string, got " + toml_lite::type_name(it->val));
    return std::nullopt;
  }

  // string or array-of-strings field; returns (values, was_array)
  std::optional<std::pair<std::vector<std::string>, bool>> want_string_or_array(
      std::string_view key) {
    const auto *it = get(key);
    if (!it) return std::nullopt;
    if (const auto *s = std::get_if<std::string>(&it->val))
      return std::make_pair(std::vector<std::string>{*s}, false);
    if (const auto *a = std::get_if<std::vector<std::string>>(&it->val))
      return std::make_pair(*a, true);
    error(manifest_error_kind::invalid_value, it->line, std::string(key),
          "'" + std::string(key) + "' must be a string or an array of strings, got " +
              toml_lite::type_name(it->val));
    return std::nullopt;
  }
};

constexpr std::string_view known_dep_fields[] = {
    "name",     "message",  "urls",   "sha256",  "post_fetch", "manual",
    "filename", "timeout_secs", "author", "license", "citation",   "website"};

void read_dep(const toml_lite::table &tbl, std::vector<dep_decl> &deps,
              std::vector<manifest_error> &errors) {
  dep_reader r{tbl, errors};
  std::size_t errors_before = errors.size();

  for (const auto &it : tbl.items) {
    bool known = std::any_of(std::begin(known_dep_fields), std::end(known_dep_fields),
                             [&](std::string_view k) { return k == it.key; });
    if (!known)
      r.error(manifest_error_kind::unknown_field, it.line, it.key,
              "unknown field '" + it.key + "' in [[datadep]]");
  }

  dep_decl dep;

  if (auto name = r.want_string("name", true)) {
    if (auto bad = validate_name(*name)) {
      r.error(manifest_error_kind::invalid_value, r.get("name")->line, "name",
              bad->to_string(*name));
    } else {
      dep.name = *name;
    }
  }

  if (auto message = r.want_string("message", true)) dep.message = *message;

  if (const auto *manual_item = r.get("manual")) {
    if (const auto *b = std::get_if<bool>(&manual_item->val))
      dep.manual = *b;
    else
      r.error(manifest_error_kind::invalid_value, manual_item->line, "manual",
              "'manual' must be a boolean");
  }

  const auto *urls_item = r.get("urls");
  if (urls_item) {
    if (const auto *a = std::get_if<std::vector<std::string>>(&urls_item->val)) {
      dep.urls = *a;
      if (dep.urls.empty())
        r.error(manifest_error_kind::invalid_value, urls_item->line, "urls",
                "'urls' must not be empty");
      for (const auto &u : dep.urls)
        if (!parse_http_url(u))
          r.error(manifest_error_kind::invalid_value, urls_item->line, "urls",
                  "'" + u + "' is not an absolute http(s) url");
    } else {
      r.error(manifest_error_kind::invalid_value, urls_item->line, "urls",
              "'urls' must be an array of strings");
    }
  }

  if (dep.manual) {
    if (urls_item)
      r.error(manifest_error_kind::invalid_value, urls_item->line, "urls",
              "manual dependencies must not declare urls");
    if (const auto *cs = r.get("sha256"))
      r.error(manifest_error_kind::invalid_value, cs->line, "sha256",
              "manual dependencies must not declare sha256");
    if (const auto *pf = r.get("post_fetch"))
      r.error(manifest_error_kind::invalid_value, pf->line, "post_fetch",
              "manual dependencies must not declare post_fetch");
  } else if (!urls_item) {
    r.error(manifest_error_kind::missing_field, tbl.line, "urls",
            "required field 'urls' is missing (or set manual = true)");
  }

  if (const auto *cs = r.get("sha256"); cs && !dep.manual) {
    if (auto got = r.want_string_or_array("sha256")) {
      auto &[digests, was_array] = *got;
      if (!was_array && digests.size() == 1 && digests[0] == "ignore") {
        dep.checksum = checksum_mode::ignore;
      } else {
        dep.checksum = checksum_mode::enforce;
        dep.sha256_was_array = was_array;
        for (auto &d : digests) {
          if (!is_sha256_hex(d)) {
            r.error(manifest_error_kind::invalid_value, cs->line, "sha256",
                    "'" + d + "' is not a 64-hex-character sha256 digest");
          }
          dep.sha256.push_back(ascii_lower(std::move(d)));
        }
        if (!dep.urls.empty() && dep.sha256.size() != dep.urls.size())
          r.error(manifest_error_kind::invalid_value, cs->line, "sha256",
                  "sha256 count (" + std::to_string(dep.sha256.size()) +
                      ") must match urls count (" + std::to_string(dep.urls.size()) + ")");
      }
    }
  }

  if (const auto *pf = r.get("post_fetch")) {
    if (const auto *s = std::get_if<std::string>(&pf->val)) {
      if (*s == "none")
        dep.post_fetch = post_fetch_action::none;
      else if (*s == "unpack")
        dep.post_fetch = post_fetch_action::unpack_auto;
      else if (*s == "unpack-delete")
        dep.post_fetch = post_fetch_action::unpack_then_delete_archive;
      else
        r.error(manifest_error_kind::invalid_value, pf->line, "post_fetch",
                "post_fetch must be one of \"none\", \"unpack\", \"unpack-delete\"");
    } else {
      r.error(manifest_error_kind::invalid_value, pf->line, "post_fetch",
              "'post_fetch' must be a string");
    }
  }

  if (const auto *fn = r.get("filename")) {
    if (auto got = r.want_string_or_array("filename")) {
      auto &[names, was_array] = *got;
      dep.filenames = names;
      dep.filename_was_array = was_array;
      if (!dep.urls.empty() && names.size() != dep.urls.size())
        r.error(manifest_error_kind::invalid_value, fn->line, "filename",
                "filename count (" + std::to_string(names.size()) + ") must match urls count (" +
                    std::to_string(dep.urls.size()) + ")");
      for (const auto &f : names)
        if (f.empty() || f == "." || f == ".." || f.find('/') != std::string::npos ||
            f.find('\\') != std::string::npos)
          r.error(manifest_error_kind::invalid_value, fn->line, "filename",
                  "'" + f + "' is not a valid single path segment");
    }
  }

  if (const auto *t = r.get("timeout_secs")) {
    if (const auto *n = std::get_if<std::int64_t>(&t->val)) {
      if (*n <= 0 || *n > 24 * 3600)
        r.error(manifest_error_kind::invalid_value, t->line, "timeout_secs",
                "timeout_secs must be between 1 and 86400");
      else
        dep.timeout_secs = *n;
    } else {
      r.error(manifest_error_kind::invalid_value, t->line, "timeout_secs",
              "'timeout_secs' must be an integer");
    }
  }

  dep.author = r.want_string("author", false);
  dep.license = r.want_string("license", false);
  dep.citation = r.want_string("citation", false);
  dep.website = r.want_string("website", false);

  if (errors.size() == errors_before) deps.push_back(std::move(dep));
}

}  // namespace

std::string manifest_error::to_string() const {
  const char *kind_name = "error";
  switch (kind) {
    case manifest_error_kind::syntax: kind_name = "syntax"; break;
    case manifest_error_kind::unknown_field: kind_name = "unknown-field"; break;
    case manifest_error_kind::missing_field: kind_name = "missing-field"; break;
    case manifest_error_kind::invalid_value: kind_name = "invalid-value"; break;
    case manifest_error_kind::duplicate_name: kind_name = "duplicate-name"; break;
    case manifest_error_kind::unsupported_version: kind_name = "unsupported-version"; break;
  }
  std::string out = "line " + std::to_string(line) + ": " + kind_name;
  if (!field.empty()) out += " [" + field + "]";
  out += ": " + message;
  return out;
}

manifest_parse_result parse_manifest(std::string_view text) {
  manifest_parse_result result;

  auto parsed = toml_lite::parse(text);
  for (const auto &d : parsed.errors)
    result.errors.push_back({manifest_error_kind::syntax, d.line, "", d.message});

  manifest m;
  bool saw_version = false;
  for (const auto &it : parsed.doc.root_items) {
    if (it.key == "version") {
      saw_version = true;
      const auto *n = std::get_if<std::int64_t>(&it.val);
      if (!n)
        result.errors.push_back({manifest_error_kind::invalid_value, it.line, "version",
                                 "'version' must be an integer"});
      else if (*n != 1)
        result.errors.push_back({manifest_error_kind::unsupported_version, it.line, "version",
                                 "unsupported manifest version " + std::to_string(*n) +
                                     " (this tool reads version 1)"});
    } else {
      result.errors.push_back({manifest_error_kind::unknown_field, it.line, it.key,
                               "unknown top-level field '" + it.key + "'"});
    }
  }
  if (!saw_version)
    result.errors.push_back(
        {manifest_error_kind::missing_field, 1, "version", "missing required 'version = 1'"});

  for (const auto &tbl : parsed.doc.tables) {
    if (tbl.name != "datadep") {
      result.errors.push_back({manifest_error_kind::unknown_field, tbl.line, tbl.name,
                               "unknown table [[" + tbl.name + "]]"});
      continue;
    }
    read_dep(tbl, m.deps, result.errors);
  }

  // Uniqueness across deps, case-insensitive to avoid directory aliasing.
  for (std::size_t i = 0; i < m.deps.size(); ++i) {
    for (std::size_t j = i + 1; j < m.deps.size(); ++j) {
      if (ascii_lower(m.deps[i].name) == ascii_lower(m.deps[j].name)) {
        result.errors.push_back(
            {manifest_error_kind::duplicate_name, 0, "name",
             "dependency name '" + m.deps[j].name + "' collides with '" + m.deps[i].name + "'"});
      }
    }
  }

  if (result.errors.empty()) result.value = std::move(m);
  return result;
}

std::string write_manifest(const manifest &m) {
  std::ostringstream os;
  os << "version = " << m.version << "\n";

  auto emit_array = [&](const std::vector<std::string> &items) {
    os << "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) os << ", ";
      os << toml_lite::quote(items[i]);
    }
    os << "]";
  };

  for (const auto &dep : m.deps) {
    os << "\n[[datadep]]\n";
    os << "name = " << toml_lite::quote(dep.name) << "\n";
    os << "message = " << toml_lite::quote(dep.message) << "\n";
    if (dep.manual) {
      os << "manual = true\n";
    } else {
      os << "urls = ";
      emit_array(dep.urls);
      os << "\n";
      if (dep.checksum == checksum_mode::ignore) {
        os << "sha256 = \"ignore\"\n";
      } else if (dep.checksum == checksum_mode::enforce) {
        os << "sha256 = ";
        if (dep.sha256_was_array || dep.sha256.size() != 1)
          emit_array(dep.sha256);
        else
          os << toml_lite::quote(dep.sha256[0]);
        os << "\n";
      }
      if (!dep.filenames.empty()) {
        os << "filename = ";
        if (dep.filename_was_array || dep.filenames.size() != 1)
          emit_array(dep.filenames);
        else
          os << toml_lite::quote(dep.filenames[0]);
        os << "\n";
      }
      if (dep.post_fetch != post_fetch_action::none)
        os << "post_fetch = \"" << to_string(dep.post_fetch) << "\"\n";
      if (dep.timeout_secs) os << "timeout_secs = " << *dep.timeout_secs << "\n";
    }
    if (dep.author) os << "author = " << toml_lite::quote(*dep.author) << "\n";
    if (dep.license) os << "license = " << toml_lite::quote(*dep.license) << "\n";
    if (dep.citation) os << "citation = " << toml_lite::quote(*dep.citation) << "\n";
    if (dep.website) os << "website = " << toml_lite::quote(*dep.website) << "\n";
  }
  return os.str();
}

data_dep_spec dep_decl::to_spec() const {
  data_dep_spec spec;
  spec.name = name;
  spec.kind = manual ? dep_kind::manual : dep_kind::managed;
  spec.post_fetch = post_fetch;

  std::string msg = message;
  if (author) msg += "\nAuthor: " + *author;
  if (license) msg += "\nLicense: " + *license;
  if (citation) msg += "\nCitation: " + *citation;
  if (website) msg += "\nWebsite: " + *website;
  spec.message = std::move(msg);

  for (std::size_t i = 0; i < urls.size(); ++i) {
    remote_file rf;
    rf.url = urls[i];
    if (i < filenames.size()) rf.filename_override = filenames[i];
    spec.remote_sources.push_back(std::move(rf));
  }

  spec.checksum.mode = checksum;
  if (checksum == checksum_mode::enforce) spec.checksum.digests = sha256;
  if (timeout_secs) spec.timeout = std::chrono::seconds(*timeout_secs);
  return spec;
}

manifest_parse_result load_manifest_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    manifest_parse_result r;
    r.errors.push_back({manifest_error_kind::syntax, 0, "",
                        "cannot open manifest: " + path.string()});
    return r;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

registry build_registry(const manifest &m) {
  registry reg;
  for (const auto &dep : m.deps) {
    auto err = reg.add(dep.to_spec());
    if (err)
      throw error(errc::config, "manifest entry '" + dep.name + "': " + err->detail);
  }
  return reg;
}

}  // namespace datadep
