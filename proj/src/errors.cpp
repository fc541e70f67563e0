#include "datadep/errors.hpp"

namespace datadep {

namespace {

std::string not_registered_message(const std::string &name,
                                   const std::optional<std::string> &suggestion) {
  std::string msg = "'" + name + "' is not a registered data dependency";
  if (suggestion) msg += " (did you mean '" + *suggestion + "'?)";
  return msg;
}

std::string manual_missing_message(const std::string &name, const std::string &provenance,
                                   const std::vector<std::filesystem::path> &locations) {
  std::string msg = "'" + name + "' is a manual data dependency and is not present locally.\n" +
                    provenance + "\nInstall it into one of:";
  for (const auto &p : locations) msg += "\n  " + p.string();
  return msg;
}

}  // namespace

not_registered_error::not_registered_error(std::string name_in,
                                           std::optional<std::string> suggestion_in)
    : error(errc::not_registered, not_registered_message(name_in, suggestion_in)),
      name(std::move(name_in)),
      suggestion(std::move(suggestion_in)) {}

manual_missing_error::manual_missing_error(std::string name_in, std::string provenance_in,
                                           std::vector<std::filesystem::path> locations_in)
    : error(errc::manual_missing, manual_missing_message(name_in, provenance_in, locations_in)),
      name(std::move(name_in)),
      provenance(std::move(provenance_in)),
      expected_locations(std::move(locations_in)) {}

checksum_mismatch_error::checksum_mismatch_error(std::string file_in, std::string expected_in,
                                                 std::string computed_in)
    : error(errc::checksum_mismatch, "checksum mismatch for '" + file_in + "': expected " +
                                         expected_in + ", computed " + computed_in),
      file(std::move(file_in)),
      expected(std::move(expected_in)),
      computed(std::move(computed_in)) {}

const char *to_string(post_fetch_failure cause) noexcept {
  switch (cause) {
    case post_fetch_failure::corrupt_archive: return "corrupt-archive";
    case post_fetch_failure::unsupported_format: return "unsupported-format";
    case post_fetch_failure::path_traversal_entry: return "path-traversal-entry";
    case post_fetch_failure::io: return "io";
  }
  return "io";
}

post_fetch_failed_error::post_fetch_failed_error(std::string file_in, post_fetch_failure cause_in,
                                                 const std::string &detail)
    : error(errc::post_fetch_failed, "post-fetch failed for '" + file_in + "' (" +
                                         datadep::to_string(cause_in) + "): " + detail),
      file(std::move(file_in)),
      cause(cause_in) {}

}  // namespace datadep
