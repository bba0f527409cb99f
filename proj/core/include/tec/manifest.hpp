#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tec::synth {

/// One entry of a clean/playback input manifest (JSON lines).
struct UtteranceEntry {
  std::string id;
  std::string path;  // relative to the manifest file
  std::string text;
};

/// One generated mixture (JSON lines). Paths are relative to the manifest.
struct MixtureRecord {
  std::string id;
  std::string mixture_path;
  std::string clean_path;
  std::string playback_path;
  std::string text;      // playback transcript, the TTS side input
  std::string phonemes;  // serialized phoneme symbols of `text`
  double snr_db = 0.0;
  std::string rir_id;
  std::uint64_t seed = 0;
  // extra bookkeeping so mixtures can be reconstructed and scored exactly
  double echo_gain = 1.0;
  double peak_scale = 1.0;
  std::string clean_text;  // transcript of the user's speech when known
};

std::vector<UtteranceEntry> read_utterance_manifest(const std::filesystem::path& file);
void write_utterance_manifest(const std::filesystem::path& file,
                              const std::vector<UtteranceEntry>& entries);

std::vector<MixtureRecord> read_mixture_manifest(const std::filesystem::path& file);
void write_mixture_manifest(const std::filesystem::path& file,
                            const std::vector<MixtureRecord>& records);

}  // namespace tec::synth
