#include "tec/container.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "tec/common.hpp"

namespace tec::io {

namespace {

std::array<std::uint32_t, 256> make_crc_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    table[i] = c;
  }
  return table;
}

void append_u32(std::vector<std::uint8_t>& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(std::uint8_t((v >> (8 * i)) & 0xff));
}

void append_u64(std::vector<std::uint8_t>& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(std::uint8_t((v >> (8 * i)) & 0xff));
}

void append_f64(std::vector<std::uint8_t>& buf, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  append_u64(buf, bits);
}

class Reader {
 public:
  Reader(const std::uint8_t* p, std::size_t n, std::string name)
      : p_(p), n_(n), name_(std::move(name)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(p_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(p_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() {
    std::uint64_t bits = u64();
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
  }
  std::string str(std::size_t len) {
    need(len);
    std::string s(reinterpret_cast<const char*>(p_ + pos_), len);
    pos_ += len;
    return s;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return n_ - pos_; }

 private:
  void need(std::size_t k) {
    if (pos_ + k > n_) fail("container: truncated file " + name_);
  }
  const std::uint8_t* p_;
  std::size_t n_;
  std::size_t pos_ = 0;
  std::string name_;
};

}  // namespace

std::uint32_t crc32(const std::uint8_t* data, std::size_t len, std::uint32_t seed) {
  static const auto table = make_crc_table();
  std::uint32_t c = seed ^ 0xFFFFFFFFu;
  for (std::size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xff] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

void write_container(const std::filesystem::path& path, const char magic[4],
                     const std::vector<ArrayRecord>& records) {
  std::vector<std::uint8_t> buf;
  buf.insert(buf.end(), magic, magic + 4);
  append_u32(buf, kContainerVersion);
  for (const auto& rec : records) {
    require(!rec.name.empty(), "container: record name must not be empty");
    std::uint64_t count = 1;
    for (auto d : rec.dims) count *= d;
    require(count == rec.data.size(),
            "container: dims/data mismatch for record \"" + rec.name + "\"");
    append_u32(buf, std::uint32_t(rec.name.size()));
    buf.insert(buf.end(), rec.name.begin(), rec.name.end());
    append_u32(buf, std::uint32_t(rec.dims.size()));
    for (auto d : rec.dims) append_u64(buf, d);
    for (double v : rec.data) append_f64(buf, v);
  }
  append_u32(buf, crc32(buf.data(), buf.size()));

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "container: cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
  require(out.good(), "container: write failed for " + path.string());
}

std::vector<ArrayRecord> read_container(const std::filesystem::path& path,
                                        const char magic[4]) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "container: cannot open " + path.string());
  std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  require(buf.size() >= 12, "container: file too small: " + path.string());

  const std::uint32_t stored_crc = std::uint32_t(buf[buf.size() - 4]) |
                                   (std::uint32_t(buf[buf.size() - 3]) << 8) |
                                   (std::uint32_t(buf[buf.size() - 2]) << 16) |
                                   (std::uint32_t(buf[buf.size() - 1]) << 24);
  require(crc32(buf.data(), buf.size() - 4) == stored_crc,
          "container: checksum mismatch in " + path.string());

  Reader r(buf.data(), buf.size() - 4, path.string());
  const std::string got_magic = r.str(4);
  require(std::memcmp(got_magic.data(), magic, 4) == 0,
          "container: wrong magic in " + path.string() + " (expected " +
              std::string(magic, 4) + ", got " + got_magic + ")");
  const std::uint32_t version = r.u32();
  require(version == kContainerVersion,
          "container: unsupported format version " + std::to_string(version) + " in " +
              path.string());

  std::vector<ArrayRecord> records;
  while (r.remaining() > 0) {
    ArrayRecord rec;
    const std::uint32_t name_len = r.u32();
    rec.name = r.str(name_len);
    const std::uint32_t rank = r.u32();
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
      rec.dims.push_back(r.u64());
      count *= rec.dims.back();
    }
    rec.data.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) rec.data[i] = r.f64();
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace tec::io
