#include "datadep/archive.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <zlib.h>

#ifdef DATADEP_HAVE_LZMA
#include <lzma.h>
#endif

#ifdef DATADEP_HAVE_BZIP2
#include "bzlib_compat.hpp"
#endif

#include "datadep/errors.hpp"

namespace datadep {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

[[noreturn]] void fail(const fs::path &archive, post_fetch_failure cause, const std::string &msg) {
  throw post_fetch_failed_error(archive.filename().string(), cause, msg);
}

// ---- byte sources ----------------------------------------------------------

class byte_source {
 public:
  virtual ~byte_source() = default;
  // Returns bytes produced; 0 means end of stream. Throws on corruption/IO.
  virtual std::size_t read(void *buf, std::size_t n) = 0;
};

class file_source final : public byte_source {
 public:
  explicit file_source(const fs::path &p) : path_(p), in_(p, std::ios::binary) {
    if (!in_) throw post_fetch_failed_error(p.filename().string(), post_fetch_failure::io,
                                            "cannot open " + p.string());
  }

  std::size_t read(void *buf, std::size_t n) override {
    in_.read(static_cast<char *>(buf), static_cast<std::streamsize>(n));
    if (in_.bad())
      throw post_fetch_failed_error(path_.filename().string(), post_fetch_failure::io,
                                    "read failure on " + path_.string());
    return static_cast<std::size_t>(in_.gcount());
  }

 private:
  fs::path path_;
  std::ifstream in_;
};

class gzip_source final : public byte_source {
 public:
  gzip_source(const fs::path &archive, std::unique_ptr<byte_source> inner)
      : archive_(archive), inner_(std::move(inner)) {
    std::memset(&strm_, 0, sizeof(strm_));
    if (inflateInit2(&strm_, 15 + 32) != Z_OK)  // auto-detect gzip/zlib wrapper
      fail(archive_, post_fetch_failure::io, "inflateInit failed");
  }

  ~gzip_source() override { inflateEnd(&strm_); }

  std::size_t read(void *buf, std::size_t n) override {
    if (finished_) return 0;
    strm_.next_out = static_cast<Bytef *>(buf);
    strm_.avail_out = static_cast<uInt>(n);
    while (strm_.avail_out > 0) {
      if (strm_.avail_in == 0) {
        in_len_ = inner_->read(in_buf_.data(), in_buf_.size());
        strm_.next_in = reinterpret_cast<Bytef *>(in_buf_.data());
        strm_.avail_in = static_cast<uInt>(in_len_);
        if (in_len_ == 0 && strm_.avail_out == n && !started_)
          fail(archive_, post_fetch_failure::corrupt_archive, "empty gzip stream");
      }
      started_ = true;
      int rc = inflate(&strm_, Z_NO_FLUSH);
      if (rc == Z_STREAM_END) {
        finished_ = true;
        break;
      }
      if (rc == Z_BUF_ERROR && strm_.avail_in == 0)
        fail(archive_, post_fetch_failure::corrupt_archive, "truncated gzip stream");
      if (rc != Z_OK)
        fail(archive_, post_fetch_failure::corrupt_archive,
             strm_.msg ? strm_.msg : "gzip decompression error");
    }
    return n - strm_.avail_out;
  }

 private:
  fs::path archive_;
  std::unique_ptr<byte_source> inner_;
  z_stream strm_{};
  std::array<char, 64 * 1024> in_buf_{};
  std::size_t in_len_ = 0;
  bool finished_ = false;
  bool started_ = false;
};

#ifdef DATADEP_HAVE_BZIP2
class bzip2_source final : public byte_source {
 public:
  bzip2_source(const fs::path &archive, std::unique_ptr<byte_source> inner)
      : archive_(archive), inner_(std::move(inner)) {
    std::memset(&strm_, 0, sizeof(strm_));
    if (BZ2_bzDecompressInit(&strm_, 0, 0) != BZ_OK)
      fail(archive_, post_fetch_failure::io, "bzDecompressInit failed");
  }

  ~bzip2_source() override { BZ2_bzDecompressEnd(&strm_); }

  std::size_t read(void *buf, std::size_t n) override {
    if (finished_) return 0;
    strm_.next_out = static_cast<char *>(buf);
    strm_.avail_out = static_cast<unsigned>(n);
    while (strm_.avail_out > 0) {
      if (strm_.avail_in == 0) {
        in_len_ = inner_->read(in_buf_.data(), in_buf_.size());
        strm_.next_in = in_buf_.data();
        strm_.avail_in = static_cast<unsigned>(in_len_);
        if (in_len_ == 0)
          fail(archive_, post_fetch_failure::corrupt_archive, "truncated bzip2 stream");
      }
      int rc = BZ2_bzDecompress(&strm_);
      if (rc == BZ_STREAM_END) {
        finished_ = true;
        break;
      }
      if (rc != BZ_OK)
        fail(archive_, post_fetch_failure::corrupt_archive, "bzip2 decompression error");
    }
    return n - strm_.avail_out;
  }

 private:
  fs::path archive_;
  std::unique_ptr<byte_source> inner_;
  bz_stream strm_{};
  std::array<char, 64 * 1024> in_buf_{};
  std::size_t in_len_ = 0;
  bool finished_ = false;
};
#endif  // DATADEP_HAVE_BZIP2

#ifdef DATADEP_HAVE_LZMA
class xz_source final : public byte_source {
 public:
  xz_source(const fs::path &archive, std::unique_ptr<byte_source> inner)
      : archive_(archive), inner_(std::move(inner)) {
    if (lzma_stream_decoder(&strm_, UINT64_MAX, LZMA_CONCATENATED) != LZMA_OK)
      fail(archive_, post_fetch_failure::io, "lzma_stream_decoder init failed");
  }

  ~xz_source() override { lzma_end(&strm_); }

  std::size_t read(void *buf, std::size_t n) override {
    if (finished_) return 0;
    strm_.next_out = static_cast<std::uint8_t *>(buf);
    strm_.avail_out = n;
    while (strm_.avail_out > 0) {
      lzma_action action = LZMA_RUN;
      if (strm_.avail_in == 0) {
        in_len_ = inner_->read(in_buf_.data(), in_buf_.size());
        strm_.next_in = reinterpret_cast<std::uint8_t *>(in_buf_.data());
        strm_.avail_in = in_len_;
      }
      if (in_len_ == 0) action = LZMA_FINISH;
      lzma_ret rc = lzma_code(&strm_, action);
      if (rc == LZMA_STREAM_END) {
        finished_ = true;
        break;
      }
      if (rc != LZMA_OK)
        fail(archive_, post_fetch_failure::corrupt_archive, "xz decompression error");
      if (action == LZMA_FINISH && strm_.avail_out > 0 && strm_.avail_in == 0)
        fail(archive_, post_fetch_failure::corrupt_archive, "truncated xz stream");
    }
    return n - strm_.avail_out;
  }

 private:
  fs::path archive_;
  std::unique_ptr<byte_source> inner_;
  lzma_stream strm_ = LZMA_STREAM_INIT;
  std::array<char, 64 * 1024> in_buf_{};
  std::size_t in_len_ = 0;
  bool finished_ = false;
};
#endif  // DATADEP_HAVE_LZMA

// ---- path safety ------------------------------------------------------------

// Joins an archive entry name onto the extraction root, refusing anything that
// could land outside it. Both '/' and '\' are treated as separators so a name
// crafted for one platform cannot traverse on another.
fs::path safe_join(const fs::path &archive, const fs::path &root, std::string_view entry_name) {
  if (entry_name.empty())
    fail(archive, post_fetch_failure::corrupt_archive, "entry with empty name");
  if (entry_name[0] == '/' || entry_name[0] == '\\' ||
      (entry_name.size() >= 2 && entry_name[1] == ':'))
    fail(archive, post_fetch_failure::path_traversal_entry,
         "absolute entry path '" + std::string(entry_name) + "'");

  fs::path joined = root;
  std::size_t start = 0;
  bool any = false;
  while (start <= entry_name.size()) {
    std::size_t cut = entry_name.find_first_of("/\\", start);
    std::string_view comp = entry_name.substr(
        start, cut == std::string_view::npos ? std::string_view::npos : cut - start);
    start = cut == std::string_view::npos ? entry_name.size() + 1 : cut + 1;
    if (comp.empty() || comp == ".") continue;
    if (comp == "..")
      fail(archive, post_fetch_failure::path_traversal_entry,
           "entry '" + std::string(entry_name) + "' escapes the extraction root");
    joined /= comp;
    any = true;
  }
  if (!any)
    fail(archive, post_fetch_failure::corrupt_archive,
         "entry name '" + std::string(entry_name) + "' has no usable components");
  return joined;
}

// Symlink targets may be relative, but the resolved destination must stay
// inside the extraction root.
void check_link_target(const fs::path &archive, const fs::path &root, const fs::path &link_path,
                       std::string_view target) {
  if (target.empty() || target[0] == '/' || target[0] == '\\' ||
      (target.size() >= 2 && target[1] == ':'))
    fail(archive, post_fetch_failure::path_traversal_entry,
         "symlink target '" + std::string(target) + "' is absolute");

  fs::path resolved = (link_path.parent_path() / target).lexically_normal();
  auto rel = resolved.lexically_relative(root.lexically_normal());
  if (rel.empty() || rel.native().starts_with(".."))
    fail(archive, post_fetch_failure::path_traversal_entry,
         "symlink target '" + std::string(target) + "' escapes the extraction root");
}

// ---- tar --------------------------------------------------------------------

struct tar_header_view {
  const unsigned char *raw;

  std::string_view field(std::size_t off, std::size_t len) const {
    const char *p = reinterpret_cast<const char *>(raw + off);
    std::size_t n = 0;
    while (n < len && p[n] != '\0') ++n;
    return {p, n};
  }
};

std::uint64_t parse_tar_number(const fs::path &archive, const unsigned char *p, std::size_t len) {
  if (p[0] & 0x80) {
    // GNU base-256 encoding for values too large for octal.
    std::uint64_t v = p[0] & 0x7f;
    for (std::size_t i = 1; i < len; ++i) v = (v << 8) | p[i];
    return v;
  }
  std::uint64_t v = 0;
  bool seen = false;
  for (std::size_t i = 0; i < len; ++i) {
    char c = static_cast<char>(p[i]);
    if (c == ' ' || c == '\0') {
      if (seen) break;
      continue;
    }
    if (c < '0' || c > '7')
      fail(archive, post_fetch_failure::corrupt_archive, "malformed numeric field in tar header");
    v = v * 8 + static_cast<std::uint64_t>(c - '0');
    seen = true;
  }
  return v;
}

bool tar_checksum_ok(const unsigned char *block, std::uint64_t stored) {
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < 512; ++i)
    sum += (i >= 148 && i < 156) ? ' ' : block[i];
  return sum == stored;
}

void read_fully(const fs::path &archive, byte_source &src, void *buf, std::size_t n) {
  auto *p = static_cast<char *>(buf);
  std::size_t got = 0;
  while (got < n) {
    std::size_t r = src.read(p + got, n - got);
    if (r == 0) fail(archive, post_fetch_failure::corrupt_archive, "unexpected end of tar stream");
    got += r;
  }
}

void skip_bytes(const fs::path &archive, byte_source &src, std::uint64_t n) {
  std::array<char, 64 * 1024> sink;
  while (n > 0) {
    std::size_t want = static_cast<std::size_t>(std::min<std::uint64_t>(n, sink.size()));
    read_fully(archive, src, sink.data(), want);
    n -= want;
  }
}

// Parses "len key=value\n" records from a pax extended header payload.
std::string pax_path_override(std::string_view payload) {
  std::string path;
  std::size_t pos = 0;
  while (pos < payload.size()) {
    std::size_t sp = payload.find(' ', pos);
    if (sp == std::string_view::npos) break;
    unsigned long rec_len = 0;
    auto len_sv = payload.substr(pos, sp - pos);
    try {
      rec_len = std::stoul(std::string(len_sv));
    } catch (...) {
      break;
    }
    if (rec_len == 0 || pos + rec_len > payload.size()) break;
    std::string_view record = payload.substr(pos, rec_len);
    std::size_t eq = record.find('=');
    if (eq != std::string_view::npos) {
      std::string_view key = record.substr(sp - pos + 1, eq - (sp - pos + 1));
      std::string_view val = record.substr(eq + 1);
      if (!val.empty() && val.back() == '\n') val.remove_suffix(1);
      if (key == "path") path = std::string(val);
    }
    pos += rec_len;
  }
  return path;
}

void extract_tar(const fs::path &archive, byte_source &src, const fs::path &root) {
  std::array<unsigned char, 512> block;
  std::string gnu_longname;
  std::string gnu_longlink;
  std::string pax_path;
  int zero_blocks = 0;

  while (true) {
    std::size_t got = 0;
    while (got < 512) {
      std::size_t r = src.read(block.data() + got, 512 - got);
      if (r == 0) {
        if (got == 0 && zero_blocks > 0) return;  // archive ended after trailer
        if (got == 0) return;                     // tolerate missing trailer blocks
        fail(archive, post_fetch_failure::corrupt_archive, "truncated tar header");
      }
      got += r;
    }

    bool all_zero = std::all_of(block.begin(), block.end(), [](unsigned char b) { return b == 0; });
    if (all_zero) {
      if (++zero_blocks == 2) return;
      continue;
    }
    zero_blocks = 0;

    tar_header_view hdr{block.data()};
    std::uint64_t stored_sum = parse_tar_number(archive, block.data() + 148, 8);
    if (!tar_checksum_ok(block.data(), stored_sum))
      fail(archive, post_fetch_failure::corrupt_archive, "tar header checksum mismatch");

    std::uint64_t size = parse_tar_number(archive, block.data() + 124, 12);
    char type = static_cast<char>(block[156]);
    std::uint64_t padded = (size + 511) & ~std::uint64_t(511);

    std::string name;
    if (!pax_path.empty()) {
      name = std::move(pax_path);
      pax_path.clear();
    } else if (!gnu_longname.empty()) {
      name = std::move(gnu_longname);
      gnu_longname.clear();
    } else {
      std::string_view base = hdr.field(0, 100);
      std::string_view prefix = hdr.field(345, 155);
      std::string_view magic = hdr.field(257, 5);
      if (magic == "ustar" && !prefix.empty())
        name = std::string(prefix) + "/" + std::string(base);
      else
        name = std::string(base);
    }

    switch (type) {
      case 'L': {  // GNU long name: payload names the next entry
        std::string payload(size, '\0');
        read_fully(archive, src, payload.data(), size);
        skip_bytes(archive, src, padded - size);
        while (!payload.empty() && payload.back() == '\0') payload.pop_back();
        gnu_longname = std::move(payload);
        continue;
      }
      case 'K': {  // GNU long link target
        std::string payload(size, '\0');
        read_fully(archive, src, payload.data(), size);
        skip_bytes(archive, src, padded - size);
        while (!payload.empty() && payload.back() == '\0') payload.pop_back();
        gnu_longlink = std::move(payload);
        continue;
      }
      case 'x': {  // pax extended header for the next entry
        std::string payload(size, '\0');
        read_fully(archive, src, payload.data(), size);
        skip_bytes(archive, src, padded - size);
        std::string p = pax_path_override(payload);
        if (!p.empty()) pax_path = std::move(p);
        continue;
      }
      case 'g':  // pax global header: no per-entry meaning we honor
        skip_bytes(archive, src, padded);
        continue;
      case '5': {
        fs::path dir = safe_join(archive, root, name);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec)
          fail(archive, post_fetch_failure::io, "mkdir " + dir.string() + ": " + ec.message());
        skip_bytes(archive, src, padded);
        continue;
      }
      case '2': {
        fs::path link_path = safe_join(archive, root, name);
        std::string target(gnu_longlink.empty() ? std::string(hdr.field(157, 100))
                                                : gnu_longlink);
        gnu_longlink.clear();
        check_link_target(archive, root, link_path, target);
        std::error_code ec;
        fs::create_directories(link_path.parent_path(), ec);
        fs::remove(link_path, ec);
        fs::create_symlink(target, link_path, ec);
        if (ec)
          fail(archive, post_fetch_failure::io,
               "symlink " + link_path.string() + ": " + ec.message());
        skip_bytes(archive, src, padded);
        continue;
      }
      case '0':
      case '\0':
      case '7': {  // '7' (contiguous) is extracted as a regular file
        fs::path out_path = safe_join(archive, root, name);
        std::error_code ec;
        fs::create_directories(out_path.parent_path(), ec);
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        if (!out)
          fail(archive, post_fetch_failure::io, "cannot create " + out_path.string());
        std::array<char, 64 * 1024> buf;
        std::uint64_t remaining = size;
        while (remaining > 0) {
          std::size_t want =
              static_cast<std::size_t>(std::min<std::uint64_t>(remaining, buf.size()));
          read_fully(archive, src, buf.data(), want);
          out.write(buf.data(), static_cast<std::streamsize>(want));
          if (!out)
            fail(archive, post_fetch_failure::io, "write failure on " + out_path.string());
          remaining -= want;
        }
        out.close();
        skip_bytes(archive, src, padded - size);
        continue;
      }
      case '1':  // hardlink: rare in datasets, refuse rather than silently drop
      default:
        fail(archive, post_fetch_failure::corrupt_archive,
             std::string("unsupported tar entry type '") + type + "' for '" + name + "'");
    }
  }
}

// ---- zip --------------------------------------------------------------------

std::uint16_t le16(const unsigned char *p) { return std::uint16_t(p[0] | (p[1] << 8)); }
std::uint32_t le32(const unsigned char *p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}
std::uint64_t le64(const unsigned char *p) {
  return std::uint64_t(le32(p)) | (std::uint64_t(le32(p + 4)) << 32);
}

struct zip_entry {
  std::string name;
  std::uint16_t method = 0;
  std::uint16_t gpflags = 0;
  std::uint32_t crc = 0;
  std::uint64_t csize = 0;
  std::uint64_t usize = 0;
  std::uint64_t local_offset = 0;
};

class zip_reader {
 public:
  zip_reader(const fs::path &archive) : archive_(archive), in_(archive, std::ios::binary) {
    if (!in_) fail(archive_, post_fetch_failure::io, "cannot open " + archive.string());
    in_.seekg(0, std::ios::end);
    file_size_ = static_cast<std::uint64_t>(in_.tellg());
    locate_central_directory();
  }

  const std::vector<zip_entry> &entries() const { return entries_; }

  void extract_entry(const zip_entry &e, const fs::path &root) {
    if (e.gpflags & 0x1)
      fail(archive_, post_fetch_failure::corrupt_archive, "encrypted zip entries are not supported");

    bool is_dir = !e.name.empty() && (e.name.back() == '/' || e.name.back() == '\\');
    if (is_dir) {
      fs::path dir = safe_join(archive_, root, e.name.substr(0, e.name.size() - 1));
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) fail(archive_, post_fetch_failure::io, "mkdir " + dir.string() + ": " + ec.message());
      return;
    }

    fs::path out_path = safe_join(archive_, root, e.name);
    std::error_code ec;
    fs::create_directories(out_path.parent_path(), ec);

    // The local header repeats name/extra with possibly different lengths.
    unsigned char lh[30];
    read_at(e.local_offset, lh, sizeof lh);
    if (le32(lh) != 0x04034b50)
      fail(archive_, post_fetch_failure::corrupt_archive, "bad local header signature");
    std::uint64_t data_off =
        e.local_offset + 30 + le16(lh + 26) + le16(lh + 28);

    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) fail(archive_, post_fetch_failure::io, "cannot create " + out_path.string());

    std::uint32_t crc = crc32(0L, Z_NULL, 0);
    std::uint64_t written = 0;

    if (e.method == 0) {  // stored
      if (e.csize != e.usize)
        fail(archive_, post_fetch_failure::corrupt_archive, "stored entry with size mismatch");
      copy_range(data_off, e.csize, [&](const char *p, std::size_t n) {
        out.write(p, static_cast<std::streamsize>(n));
        crc = crc32(crc, reinterpret_cast<const Bytef *>(p), static_cast<uInt>(n));
        written += n;
        return out.good();
      });
    } else if (e.method == 8) {  // deflate
      inflate_range(data_off, e.csize, [&](const char *p, std::size_t n) {
        out.write(p, static_cast<std::streamsize>(n));
        crc = crc32(crc, reinterpret_cast<const Bytef *>(p), static_cast<uInt>(n));
        written += n;
        return out.good();
      });
    } else {
      fail(archive_, post_fetch_failure::corrupt_archive,
           "unsupported zip compression method " + std::to_string(e.method));
    }

    out.close();
    if (!out) fail(archive_, post_fetch_failure::io, "write failure on " + out_path.string());
    if (written != e.usize)
      fail(archive_, post_fetch_failure::corrupt_archive,
           "entry '" + e.name + "' inflated to " + std::to_string(written) + " bytes, expected " +
               std::to_string(e.usize));
    if (crc != e.crc)
      fail(archive_, post_fetch_failure::corrupt_archive, "crc mismatch in '" + e.name + "'");
  }

 private:
  void read_at(std::uint64_t off, void *buf, std::size_t n) {
    in_.clear();
    in_.seekg(static_cast<std::streamoff>(off));
    in_.read(static_cast<char *>(buf), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
      fail(archive_, post_fetch_failure::corrupt_archive, "unexpected end of zip file");
  }

  template <typename Sink>
  void copy_range(std::uint64_t off, std::uint64_t len, Sink &&sink) {
    std::array<char, 64 * 1024> buf;
    std::uint64_t pos = off;
    while (len > 0) {
      std::size_t want = static_cast<std::size_t>(std::min<std::uint64_t>(len, buf.size()));
      read_at(pos, buf.data(), want);
      if (!sink(buf.data(), want))
        fail(archive_, post_fetch_failure::io, "write failure during extraction");
      pos += want;
      len -= want;
    }
  }

  template <typename Sink>
  void inflate_range(std::uint64_t off, std::uint64_t clen, Sink &&sink) {
    z_stream strm{};
    if (inflateInit2(&strm, -15) != Z_OK)
      fail(archive_, post_fetch_failure::io, "inflateInit failed");
    struct guard {
      z_stream *s;
      ~guard() { inflateEnd(s); }
    } g{&strm};

    std::array<char, 64 * 1024> in_buf;
    std::array<char, 64 * 1024> out_buf;
    std::uint64_t pos = off;
    std::uint64_t remaining = clen;
    int rc = Z_OK;

    while (rc != Z_STREAM_END) {
      if (strm.avail_in == 0) {
        if (remaining == 0)
          fail(archive_, post_fetch_failure::corrupt_archive, "truncated deflate stream");
        std::size_t want =
            static_cast<std::size_t>(std::min<std::uint64_t>(remaining, in_buf.size()));
        read_at(pos, in_buf.data(), want);
        pos += want;
        remaining -= want;
        strm.next_in = reinterpret_cast<Bytef *>(in_buf.data());
        strm.avail_in = static_cast<uInt>(want);
      }
      strm.next_out = reinterpret_cast<Bytef *>(out_buf.data());
      strm.avail_out = static_cast<uInt>(out_buf.size());
      rc = inflate(&strm, Z_NO_FLUSH);
      if (rc != Z_OK && rc != Z_STREAM_END)
        fail(archive_, post_fetch_failure::corrupt_archive,
             strm.msg ? strm.msg : "deflate decompression error");
      std::size_t produced = out_buf.size() - strm.avail_out;
      if (produced > 0 && !sink(out_buf.data(), produced))
        fail(archive_, post_fetch_failure::io, "write failure during extraction");
    }
  }

  void locate_central_directory() {
    // End-of-central-directory record: signature 0x06054b50, within the last
    // 64 KiB + 22 bytes of the file.
    const std::uint64_t max_scan = std::min<std::uint64_t>(file_size_, 65536 + 22);
    if (file_size_ < 22)
      fail(archive_, post_fetch_failure::corrupt_archive, "file too small to be a zip");
    std::vector<unsigned char> tail(static_cast<std::size_t>(max_scan));
    read_at(file_size_ - max_scan, tail.data(), tail.size());

    std::size_t eocd = tail.size();
    for (std::size_t i = tail.size() - 22 + 1; i-- > 0;) {
      if (le32(tail.data() + i) == 0x06054b50) {
        eocd = i;
        break;
      }
    }
    if (eocd == tail.size())
      fail(archive_, post_fetch_failure::corrupt_archive, "end-of-central-directory not found");

    const unsigned char *p = tail.data() + eocd;
    std::uint64_t entry_count = le16(p + 10);
    std::uint64_t cd_size = le32(p + 12);
    std::uint64_t cd_offset = le32(p + 16);

    // zip64: sentinel values redirect through the zip64 EOCD record.
    if (entry_count == 0xffff || cd_offset == 0xffffffff || cd_size == 0xffffffff) {
      std::uint64_t eocd_abs = file_size_ - max_scan + eocd;
      if (eocd_abs < 20)
        fail(archive_, post_fetch_failure::corrupt_archive, "zip64 locator missing");
      unsigned char loc[20];
      read_at(eocd_abs - 20, loc, sizeof loc);
      if (le32(loc) != 0x07064b50)
        fail(archive_, post_fetch_failure::corrupt_archive, "zip64 locator missing");
      std::uint64_t z64_off = le64(loc + 8);
      unsigned char rec[56];
      read_at(z64_off, rec, sizeof rec);
      if (le32(rec) != 0x06064b50)
        fail(archive_, post_fetch_failure::corrupt_archive, "zip64 record missing");
      entry_count = le64(rec + 32);
      cd_size = le64(rec + 40);
      cd_offset = le64(rec + 48);
    }

    std::vector<unsigned char> cd(static_cast<std::size_t>(cd_size));
    if (cd_size > 0) read_at(cd_offset, cd.data(), cd.size());

    std::size_t pos = 0;
    for (std::uint64_t i = 0; i < entry_count; ++i) {
      if (pos + 46 > cd.size() || le32(cd.data() + pos) != 0x02014b50)
        fail(archive_, post_fetch_failure::corrupt_archive, "malformed central directory");
      const unsigned char *e = cd.data() + pos;
      zip_entry entry;
      entry.gpflags = le16(e + 8);
      entry.method = le16(e + 10);
      entry.crc = le32(e + 16);
      entry.csize = le32(e + 20);
      entry.usize = le32(e + 24);
      std::uint16_t name_len = le16(e + 28);
      std::uint16_t extra_len = le16(e + 30);
      std::uint16_t comment_len = le16(e + 32);
      entry.local_offset = le32(e + 42);
      if (pos + 46 + name_len + extra_len + comment_len > cd.size())
        fail(archive_, post_fetch_failure::corrupt_archive, "malformed central directory");
      entry.name.assign(reinterpret_cast<const char *>(e + 46), name_len);

      // zip64 extra field (id 0x0001) overrides 32-bit sentinel sizes/offset.
      std::size_t xpos = pos + 46 + name_len;
      std::size_t xend = xpos + extra_len;
      while (xpos + 4 <= xend) {
        std::uint16_t id = le16(cd.data() + xpos);
        std::uint16_t len = le16(cd.data() + xpos + 2);
        if (xpos + 4 + len > xend) break;
        if (id == 0x0001) {
          const unsigned char *x = cd.data() + xpos + 4;
          std::size_t xoff = 0;
          if (entry.usize == 0xffffffff && xoff + 8 <= len) {
            entry.usize = le64(x + xoff);
            xoff += 8;
          }
          if (entry.csize == 0xffffffff && xoff + 8 <= len) {
            entry.csize = le64(x + xoff);
            xoff += 8;
          }
          if (entry.local_offset == 0xffffffff && xoff + 8 <= len) {
            entry.local_offset = le64(x + xoff);
            xoff += 8;
          }
        }
        xpos += 4 + std::size_t(len);
      }

      entries_.push_back(std::move(entry));
      pos += 46 + name_len + extra_len + comment_len;
    }
  }

  fs::path archive_;
  std::ifstream in_;
  std::uint64_t file_size_ = 0;
  std::vector<zip_entry> entries_;
};

void extract_zip(const fs::path &archive, const fs::path &root) {
  zip_reader reader(archive);
  for (const auto &entry : reader.entries()) reader.extract_entry(entry, root);
}

void extract_bare_gz(const fs::path &archive, const fs::path &root) {
  std::string base = archive.filename().string();
  base = base.substr(0, base.size() - 3);  // caller guarantees the ".gz" suffix
  if (base.empty()) base = "download";

  gzip_source src(archive, std::make_unique<file_source>(archive));
  fs::path out_path = root / base;
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) fail(archive, post_fetch_failure::io, "cannot create " + out_path.string());

  std::array<char, 64 * 1024> buf;
  while (true) {
    std::size_t got = src.read(buf.data(), buf.size());
    if (got == 0) break;
    out.write(buf.data(), static_cast<std::streamsize>(got));
    if (!out) fail(archive, post_fetch_failure::io, "write failure on " + out_path.string());
  }
}

}  // namespace

bool is_archive_filename(std::string_view name) {
  std::string n = lower(name);
  return ends_with(n, ".zip") || ends_with(n, ".tar") || ends_with(n, ".tar.gz") ||
         ends_with(n, ".tgz") || ends_with(n, ".tar.bz2") || ends_with(n, ".tar.xz") ||
         ends_with(n, ".gz");
}

void unpack_archive(const fs::path &archive, const fs::path &dest_root) {
  std::string n = lower(archive.filename().string());

  if (ends_with(n, ".zip")) {
    extract_zip(archive, dest_root);
    return;
  }
  if (ends_with(n, ".tar")) {
    file_source src(archive);
    extract_tar(archive, src, dest_root);
    return;
  }
  if (ends_with(n, ".tar.gz") || ends_with(n, ".tgz")) {
    gzip_source src(archive, std::make_unique<file_source>(archive));
    extract_tar(archive, src, dest_root);
    return;
  }
  if (ends_with(n, ".tar.bz2")) {
#ifdef DATADEP_HAVE_BZIP2
    bzip2_source src(archive, std::make_unique<file_source>(archive));
    extract_tar(archive, src, dest_root);
    return;
#else
    fail(archive, post_fetch_failure::io, "bzip2 support is not available in this build");
#endif
  }
  if (ends_with(n, ".tar.xz")) {
#ifdef DATADEP_HAVE_LZMA
    xz_source src(archive, std::make_unique<file_source>(archive));
    extract_tar(archive, src, dest_root);
    return;
#else
    fail(archive, post_fetch_failure::io, "xz support is not available in this build");
#endif
  }
  if (ends_with(n, ".gz")) {
    extract_bare_gz(archive, dest_root);
    return;
  }

  fail(archive, post_fetch_failure::unsupported_format,
       "'" + archive.filename().string() + "' is not a recognized archive format");
}

}  // namespace datadep
