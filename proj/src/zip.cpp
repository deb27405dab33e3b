#include "steerlab/zip.hpp"

#include <cstdint>
#include <cstring>
#include <limits>

#include <zlib.h>

#include "steerlab/error.hpp"

namespace steer::zip {
namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;  // 1980-01-01

void put16(std::string& out, std::uint16_t v) {
  out += static_cast<char>(v & 0xff);
  out += static_cast<char>(v >> 8);
}

void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

std::uint32_t crc32_of(const std::string& s) {
  uLong crc = crc32(0L, Z_NULL, 0);
  const auto* p = reinterpret_cast<const Bytef*>(s.data());
  std::size_t left = s.size();
  while (left > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
    crc = crc32(crc, p, chunk);
    p += chunk;
    left -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

class Reader {
 public:
  Reader(const std::string& buf, std::string what) : buf_(buf), what_(std::move(what)) {}

  std::uint16_t u16(std::size_t at) const {
    need(at, 2);
    return static_cast<std::uint16_t>(byte(at) | (byte(at + 1) << 8));
  }
  std::uint32_t u32(std::size_t at) const {
    need(at, 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | byte(at + i);
    return v;
  }
  std::uint64_t u64(std::size_t at) const {
    return static_cast<std::uint64_t>(u32(at)) | (static_cast<std::uint64_t>(u32(at + 4)) << 32);
  }
  void need(std::size_t at, std::size_t n) const {
    if (at > buf_.size() || buf_.size() - at < n) fail("truncated archive");
  }
  [[noreturn]] void fail(const std::string& msg) const { throw DataError(what_ + ": " + msg); }
  const std::string& buf() const { return buf_; }

 private:
  unsigned byte(std::size_t at) const { return static_cast<unsigned char>(buf_[at]); }
  const std::string& buf_;
  std::string what_;
};

std::string inflate_raw(const std::string& in, std::size_t expected, const Reader& r) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) r.fail("inflate init failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) r.fail("corrupt deflate stream");
  return out;
}

}  // namespace

std::string write(const std::vector<Entry>& entries) {
  std::string out;
  std::string central;
  for (const Entry& e : entries) {
    if (e.data.size() >= std::numeric_limits<std::uint32_t>::max() ||
        out.size() >= std::numeric_limits<std::uint32_t>::max()) {
      throw DataError("zip: member " + e.name + " exceeds the 4 GiB limit");
    }
    const std::uint32_t crc = crc32_of(e.data);
    const auto size = static_cast<std::uint32_t>(e.data.size());
    const auto offset = static_cast<std::uint32_t>(out.size());
    const auto name_len = static_cast<std::uint16_t>(e.name.size());

    put32(out, kLocalSig);
    put16(out, 20);  // version needed
    put16(out, 0);   // flags
    put16(out, 0);   // stored
    put16(out, 0);   // time
    put16(out, kDosDate);
    put32(out, crc);
    put32(out, size);
    put32(out, size);
    put16(out, name_len);
    put16(out, 0);
    out += e.name;
    out += e.data;

    put32(central, kCentralSig);
    put16(central, 20);  // made by
    put16(central, 20);  // needed
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put16(central, kDosDate);
    put32(central, crc);
    put32(central, size);
    put32(central, size);
    put16(central, name_len);
    put16(central, 0);  // extra
    put16(central, 0);  // comment
    put16(central, 0);  // disk
    put16(central, 0);  // internal attrs
    put32(central, 0);  // external attrs
    put32(central, offset);
    central += e.name;
  }
  const auto cd_offset = static_cast<std::uint32_t>(out.size());
  out += central;
  put32(out, kEndSig);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint16_t>(entries.size()));
  put16(out, static_cast<std::uint16_t>(entries.size()));
  put32(out, static_cast<std::uint32_t>(central.size()));
  put32(out, cd_offset);
  put16(out, 0);
  return out;
}

std::vector<Entry> read(const std::string& archive, const std::string& what) {
  Reader r(archive, what);
  if (archive.size() < 22) r.fail("not a zip archive");

  // End-of-central-directory record, possibly followed by a comment.
  std::size_t eocd = std::string::npos;
  const std::size_t lowest = archive.size() > 22 + 0xffff ? archive.size() - 22 - 0xffff : 0;
  for (std::size_t at = archive.size() - 22 + 1; at-- > lowest;) {
    if (r.u32(at) == kEndSig) {
      eocd = at;
      break;
    }
  }
  if (eocd == std::string::npos) r.fail("no end-of-central-directory record");

  std::uint64_t count = r.u16(eocd + 10);
  std::uint64_t cd_offset = r.u32(eocd + 16);
  if (count == 0xffff || cd_offset == 0xffffffffu) {
    // Zip64 locator sits right before the classic record.
    if (eocd < 20 || r.u32(eocd - 20) != 0x07064b50) r.fail("missing Zip64 locator");
    const std::uint64_t z64 = r.u64(eocd - 20 + 8);
    if (r.u32(z64) != 0x06064b50) r.fail("bad Zip64 end record");
    count = r.u64(z64 + 32);
    cd_offset = r.u64(z64 + 48);
  }

  std::vector<Entry> entries;
  std::size_t at = cd_offset;
  for (std::uint64_t i = 0; i < count; ++i) {
    if (r.u32(at) != kCentralSig) r.fail("bad central directory entry");
    const std::uint16_t method = r.u16(at + 10);
    const std::uint32_t crc = r.u32(at + 16);
    std::uint64_t csize = r.u32(at + 20);
    std::uint64_t usize = r.u32(at + 24);
    const std::uint16_t name_len = r.u16(at + 28);
    const std::uint16_t extra_len = r.u16(at + 30);
    const std::uint16_t comment_len = r.u16(at + 32);
    std::uint64_t local = r.u32(at + 42);
    r.need(at + 46, name_len + extra_len);
    std::string name = archive.substr(at + 46, name_len);

    // Zip64 extended information: only the saturated fields are present, in order.
    std::size_t ex = at + 46 + name_len;
    const std::size_t ex_end = ex + extra_len;
    while (ex + 4 <= ex_end) {
      const std::uint16_t id = r.u16(ex);
      const std::uint16_t len = r.u16(ex + 2);
      if (id == 0x0001) {
        std::size_t f = ex + 4;
        if (usize == 0xffffffffu) { usize = r.u64(f); f += 8; }
        if (csize == 0xffffffffu) { csize = r.u64(f); f += 8; }
        if (local == 0xffffffffu) { local = r.u64(f); f += 8; }
      }
      ex += 4 + len;
    }
    at = ex_end + comment_len;

    if (r.u32(local) != kLocalSig) r.fail("bad local header for " + name);
    const std::size_t data_at = local + 30 + r.u16(local + 26) + r.u16(local + 28);
    r.need(data_at, csize);
    std::string raw = archive.substr(data_at, csize);

    if (!name.empty() && name.back() == '/') continue;  // directory
    std::string data;
    if (method == 0) {
      if (csize != usize) r.fail("size mismatch in stored member " + name);
      data = std::move(raw);
    } else if (method == 8) {
      data = inflate_raw(raw, usize, r);
    } else {
      r.fail("unsupported compression method " + std::to_string(method) + " for " + name);
    }
    if (crc32_of(data) != crc) r.fail("CRC mismatch in " + name);
    entries.push_back({std::move(name), std::move(data)});
  }
  return entries;
}

}  // namespace steer::zip
