#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tec/signal.hpp"

namespace tec::corpus {

/// One built-in utterance; audio is synthesized deterministically from the id.
struct Utterance {
  std::string id;
  std::string text;
};

// Miniature stand-ins for the user-speech and interfering-speech corpora.
// "train"/"test" mirror the usual split structure at desk scale.
const std::vector<Utterance>& clean_train();
const std::vector<Utterance>& clean_test();
const std::vector<Utterance>& playback_train();
const std::vector<Utterance>& playback_test();

// Formant-style synthesizer: each phone renders as a short harmonic or noise
// segment, so transcripts of different lengths give different durations.
dsp::Waveform synth_utterance(const std::string& text, std::uint64_t seed,
                              int sample_rate_hz = dsp::kDefaultSampleRate);

// Resolves the corpus directory: TEC_DATA_DIR when set, otherwise fallback.
std::filesystem::path corpus_dir(const std::filesystem::path& fallback);

// Writes wavs and the four manifests (clean_train.jsonl, clean_test.jsonl,
// playback_train.jsonl, playback_test.jsonl) unless already present.
void ensure_corpus(const std::filesystem::path& dir);

}  // namespace tec::corpus
