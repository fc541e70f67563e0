#include "datadep/registry.hpp"

#include <algorithm>
#include <cctype>

#include "datadep/url.hpp"

namespace datadep {

namespace {

bool first_char_ok(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

bool rest_char_ok(char c) {
  return first_char_ok(c) || c == ' ' || c == '.' || c == '-';
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string name_error::to_string(std::string_view name) const {
  switch (kind) {
    case name_error_kind::empty:
      return "name is empty";
    case name_error_kind::too_long:
      return "name exceeds 128 characters";
    case name_error_kind::reserved:
      return "name '" + std::string(name) + "' is reserved";
    case name_error_kind::illegal_char:
      return "name '" + std::string(name) + "' has an illegal character at position " +
             std::to_string(position);
  }
  return "invalid name";
}

std::optional<name_error> validate_name(std::string_view name) {
  if (name.empty()) return name_error{name_error_kind::empty};
  if (name.size() > 128) return name_error{name_error_kind::too_long};
  if (name == "." || name == "..") return name_error{name_error_kind::reserved};
  if (!first_char_ok(name[0])) return name_error{name_error_kind::illegal_char, 0};
  for (std::size_t i = 1; i < name.size(); ++i) {
    if (!rest_char_ok(name[i])) return name_error{name_error_kind::illegal_char, i};
  }
  return std::nullopt;
}

std::optional<std::string> spec_invariant_violation(const data_dep_spec &spec) {
  if (auto err = validate_name(spec.name)) return err->to_string(spec.name);

  if (spec.kind == dep_kind::manual) {
    if (!spec.remote_sources.empty())
      return "manual dependency '" + spec.name + "' must not declare remote sources";
    if (spec.checksum.mode != checksum_mode::absent)
      return "manual dependency '" + spec.name + "' must not declare a checksum";
  } else {
    if (spec.remote_sources.empty())
      return "managed dependency '" + spec.name + "' needs at least one remote source";
  }

  if (spec.checksum.mode == checksum_mode::enforce) {
    if (spec.checksum.digests.size() != spec.remote_sources.size())
      return "dependency '" + spec.name + "' declares " +
             std::to_string(spec.checksum.digests.size()) + " digests for " +
             std::to_string(spec.remote_sources.size()) + " sources";
    for (const auto &d : spec.checksum.digests) {
      bool ok = d.size() == 64 && std::all_of(d.begin(), d.end(), [](char c) {
                  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
                });
      if (!ok) return "dependency '" + spec.name + "' has a malformed sha256 digest";
    }
  } else if (!spec.checksum.digests.empty()) {
    return "dependency '" + spec.name + "' carries digests but checksum mode is not enforce";
  }

  for (const auto &src : spec.remote_sources) {
    if (!parse_http_url(src.url))
      return "dependency '" + spec.name + "' has a url that is not absolute http(s): '" +
             src.url + "'";
    if (src.filename_override) {
      const std::string &f = *src.filename_override;
      if (f.empty() || f == "." || f == ".." ||
          f.find('/') != std::string::npos || f.find('\\') != std::string::npos)
        return "dependency '" + spec.name + "' has an invalid filename override: '" + f + "'";
    }
  }
  return std::nullopt;
}

std::optional<registration_error> registry::add(data_dep_spec spec) {
  if (auto violation = spec_invariant_violation(spec))
    return registration_error{registration_error_kind::invalid_spec, *violation};

  std::string folded = ascii_lower(spec.name);
  for (const auto &existing : specs_) {
    if (ascii_lower(existing.name) == folded)
      return registration_error{registration_error_kind::duplicate_name,
                                "a dependency named '" + existing.name + "' already exists" +
                                    (existing.name == spec.name ? "" : " (differs only by case)")};
  }

  index_.emplace(spec.name, specs_.size());
  specs_.push_back(std::move(spec));
  return std::nullopt;
}

const data_dep_spec *registry::find(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return nullptr;
  return &specs_[it->second];
}

std::optional<std::string> registry::suggest(std::string_view name) const {
  std::optional<std::string> best;
  std::size_t best_dist = 3;
  for (const auto &spec : specs_) {
    std::size_t d = edit_distance_capped(name, spec.name, 2);
    if (d < best_dist) {
      best_dist = d;
      best = spec.name;
    }
  }
  return best;
}

std::size_t edit_distance_capped(std::string_view a, std::string_view b, std::size_t limit) {
  if (a.size() > b.size()) std::swap(a, b);
  if (b.size() - a.size() > limit) return limit + 1;

  std::vector<std::size_t> prev(a.size() + 1), cur(a.size() + 1);
  for (std::size_t i = 0; i <= a.size(); ++i) prev[i] = i;

  for (std::size_t j = 1; j <= b.size(); ++j) {
    cur[0] = j;
    std::size_t row_min = cur[0];
    for (std::size_t i = 1; i <= a.size(); ++i) {
      std::size_t sub = prev[i - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[i] = std::min({prev[i] + 1, cur[i - 1] + 1, sub});
      row_min = std::min(row_min, cur[i]);
    }
    if (row_min > limit) return limit + 1;
    std::swap(prev, cur);
  }
  return std::min(prev[a.size()], limit + 1);
}

const char *to_string(dep_kind k) noexcept {
  return k == dep_kind::manual ? "manual" : "managed";
}

const char *to_string(post_fetch_action a) noexcept {
  switch (a) {
    case post_fetch_action::none: return "none";
    case post_fetch_action::unpack_auto: return "unpack";
    case post_fetch_action::unpack_then_delete_archive: return "unpack-delete";
  }
  return "none";
}

const char *to_string(checksum_mode m) noexcept {
  switch (m) {
    case checksum_mode::enforce: return "enforce";
    case checksum_mode::ignore: return "ignore";
    case checksum_mode::absent: return "absent";
  }
  return "absent";
}

}  // namespace datadep
