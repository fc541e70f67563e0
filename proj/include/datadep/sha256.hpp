#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace datadep {

// Streaming SHA-256 (FIPS 180-4). Constant memory with respect to input size.
class sha256 {
 public:
  sha256() { reset(); }

  void reset();
  void update(const void *data, std::size_t len);
  void update(std::string_view s) { update(s.data(), s.size()); }

  // Finalizes and returns the 32-byte digest; the object must be reset before reuse.
  std::array<std::uint8_t, 32> finish();

  // Finalizes and returns the digest as 64 lowercase hex characters.
  std::string finish_hex();

 private:
  void process_block(const std::uint8_t *block);

  std::array<std::uint32_t, 8> state_{};
  std::uint64_t total_bytes_ = 0;
  std::array<std::uint8_t, 64> buffer_{};
  std::size_t buffered_ = 0;
};

std::string sha256_hex(std::string_view data);

// Streams the file through sha256 in 64 KiB chunks. Throws error(errc::io) when
// the file cannot be read.
std::string sha256_file_hex(const std::filesystem::path &file);

std::string to_hex(const std::uint8_t *data, std::size_t len);

}  // namespace datadep
