#include "tec/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace tec::dsp {

namespace {

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}

std::uint16_t read_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return std::uint16_t(b[0]) | (std::uint16_t(b[1]) << 8);
}

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<char*>(b), 4);
}

void write_u16(std::ostream& out, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff)};
  out.write(reinterpret_cast<char*>(b), 2);
}

struct WavInfo {
  int sample_rate = 0;
  std::streampos data_pos;
  std::uint32_t data_bytes = 0;
};

WavInfo parse_header(std::istream& in, const std::string& name) {
  char tag[4];
  in.read(tag, 4);
  require(in.good() && std::memcmp(tag, "RIFF", 4) == 0, name + ": not a RIFF file");
  read_u32(in);  // total size, unused
  in.read(tag, 4);
  require(in.good() && std::memcmp(tag, "WAVE", 4) == 0, name + ": not a WAVE file");

  WavInfo info;
  bool have_fmt = false;
  while (in.read(tag, 4)) {
    std::uint32_t chunk = read_u32(in);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      std::uint16_t format = read_u16(in);
      std::uint16_t channels = read_u16(in);
      std::uint32_t rate = read_u32(in);
      read_u32(in);  // byte rate
      read_u16(in);  // block align
      std::uint16_t bits = read_u16(in);
      require(format == 1, name + ": only PCM wav supported");
      require(channels == 1, name + ": only mono wav supported");
      require(bits == 16, name + ": only 16-bit wav supported");
      info.sample_rate = int(rate);
      have_fmt = true;
      if (chunk > 16) in.seekg(chunk - 16, std::ios::cur);
    } else if (std::memcmp(tag, "data", 4) == 0) {
      info.data_pos = in.tellg();
      info.data_bytes = chunk;
      // chunks are word aligned
      in.seekg(chunk + (chunk & 1), std::ios::cur);
    } else {
      in.seekg(chunk + (chunk & 1), std::ios::cur);
    }
  }
  require(have_fmt && info.data_bytes > 0, name + ": missing fmt or data chunk");
  return info;
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "read_wav: cannot open " + path.string());
  WavInfo info = parse_header(in, path.string());

  in.clear();
  in.seekg(info.data_pos);
  const std::size_t n = info.data_bytes / 2;
  std::vector<char> raw(info.data_bytes);
  in.read(raw.data(), info.data_bytes);
  require(in.gcount() == std::streamsize(info.data_bytes),
          "read_wav: truncated data chunk in " + path.string());

  Waveform w;
  w.sample_rate_hz = info.sample_rate;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::int16_t s = std::int16_t(std::uint8_t(raw[2 * i]) |
                                        (std::uint16_t(std::uint8_t(raw[2 * i + 1])) << 8));
    w.samples[i] = double(s) / 32768.0;
  }
  return w;
}

void write_wav(const std::filesystem::path& path, const Waveform& w) {
  require(w.sample_rate_hz > 0, "write_wav: sample rate must be positive");
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "write_wav: cannot open " + path.string());

  const std::uint32_t data_bytes = std::uint32_t(w.samples.size() * 2);
  out.write("RIFF", 4);
  write_u32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, 1);  // PCM
  write_u16(out, 1);  // mono
  write_u32(out, std::uint32_t(w.sample_rate_hz));
  write_u32(out, std::uint32_t(w.sample_rate_hz * 2));
  write_u16(out, 2);
  write_u16(out, 16);
  out.write("data", 4);
  write_u32(out, data_bytes);

  for (double s : w.samples) {
    long v = std::lround(s * 32768.0);
    v = std::clamp(v, -32768l, 32767l);
    write_u16(out, std::uint16_t(std::int16_t(v)));
  }
  require(out.good(), "write_wav: write failed for " + path.string());
}

std::size_t wav_payload_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "wav_payload_bytes: cannot open " + path.string());
  return parse_header(in, path.string()).data_bytes;
}

}  // namespace tec::dsp
