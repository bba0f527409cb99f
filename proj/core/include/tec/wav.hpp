#pragma once

#include <filesystem>

#include "tec/signal.hpp"

namespace tec::dsp {

// PCM 16-bit little-endian mono only. Samples are mapped to [-1, 1] by
// dividing by 32768; the writer is the exact inverse with saturation.
Waveform read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const Waveform& w);

// Byte length of the PCM payload (the "data" chunk) without reading samples.
std::size_t wav_payload_bytes(const std::filesystem::path& path);

}  // namespace tec::dsp
