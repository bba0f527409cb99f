#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tec::io {

/// One named f64 array inside a container file.
struct ArrayRecord {
  std::string name;
  std::vector<std::uint64_t> dims;
  std::vector<double> data;
};

// Versioned binary container: magic (4 bytes), format version u32, then
// repeated records {name length u32, name bytes, rank u32, dims u64 each,
// little-endian f64 payload}, then a CRC32 footer over everything before it.
// Readers reject unknown magics, versions, and checksum mismatches.
constexpr std::uint32_t kContainerVersion = 1;

void write_container(const std::filesystem::path& path, const char magic[4],
                     const std::vector<ArrayRecord>& records);
std::vector<ArrayRecord> read_container(const std::filesystem::path& path,
                                        const char magic[4]);

std::uint32_t crc32(const std::uint8_t* data, std::size_t len, std::uint32_t seed = 0);

}  // namespace tec::io
