#pragma once

#include <filesystem>
#include <string_view>

namespace datadep {

// True for the archive suffixes post-fetch unpacking recognizes:
// .zip .tar .tar.gz .tgz .tar.bz2 .tar.xz .gz (case-insensitive).
bool is_archive_filename(std::string_view name);

// Extracts `archive` into dest_root, keeping the archive's internal layout.
// Entries that would land outside dest_root (absolute paths or ".." traversal,
// including symlink targets) abort the extraction. A bare .gz decompresses to
// the filename minus its suffix. Format is chosen by suffix; a file that does
// not match its suffix surfaces as corrupt. Throws post_fetch_failed_error.
void unpack_archive(const std::filesystem::path &archive, const std::filesystem::path &dest_root);

}  // namespace datadep
