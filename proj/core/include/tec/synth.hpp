#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <utility>

#include "tec/manifest.hpp"
#include "tec/rng.hpp"
#include "tec/signal.hpp"

namespace tec::synth {

/// Shoebox room for the image-source simulator.
struct RoomConfig {
  std::array<double, 3> dimensions_m{4.0, 5.0, 3.0};
  std::array<double, 3> source_pos_m{1.0, 1.5, 1.2};
  std::array<double, 3> mic_pos_m{2.8, 3.2, 1.5};
  double absorption = 0.5;  // wall absorption coefficient in (0, 1]
  int max_order = 2;        // image reflection order
  double speed_of_sound_mps = 343.0;

  void validate() const;
};

struct Rir {
  std::vector<double> taps;
  int sample_rate_hz = dsp::kDefaultSampleRate;
};

// Image-source RIR for a shoebox room. Each image contributes a tap at
// delay round(distance/c * fs) with amplitude (1/distance) *
// (1 - absorption)^reflections. Deterministic; the seed is recorded but the
// tap set depends on the room alone.
Rir generate_rir(const RoomConfig& cfg, std::uint64_t seed,
                 int sample_rate_hz = dsp::kDefaultSampleRate);

// convolve(y, h); the echo as it reaches the microphone.
dsp::Waveform apply_echo_path(const dsp::Waveform& y, const Rir& h);

std::pair<dsp::Waveform, dsp::Waveform> pad_to_equal_length(const dsp::Waveform& a,
                                                            const dsp::Waveform& b);

struct MixResult {
  dsp::Waveform mixture;
  double echo_scale = 1.0;  // g applied to the echo to hit the requested SNR
  double peak_scale = 1.0;  // post-sum normalization, 1.0 unless clipping
};

// Scales the echo so that 10*log10(E_clean / E_scaled_echo) = snr_db, pads
// both signals to equal length and sums them. Peak-normalizes the sum if it
// would leave [-1, 1].
MixResult mix_at_snr(const dsp::Waveform& clean, const dsp::Waveform& echo, double snr_db);

/// Distribution of rooms used by the dataset builder.
struct RoomsSpec {
  int count = 4;
  std::array<double, 2> length_m{3.0, 6.0};
  std::array<double, 2> width_m{3.0, 5.0};
  std::array<double, 2> height_m{2.4, 3.2};
  std::array<double, 2> absorption{0.3, 0.7};
  int max_order = 2;

  static RoomsSpec from_json_file(const std::filesystem::path& file);
  void to_json_file(const std::filesystem::path& file) const;
};

std::vector<RoomConfig> sample_rooms(const RoomsSpec& spec, Rng& rng);

/// Everything produced while synthesizing one record, in the float domain.
struct SynthesizedRecord {
  MixtureRecord record;
  dsp::Waveform mixture;       // as written (peak-normalized if needed)
  dsp::Waveform clean_padded;  // z after padding
  dsp::Waveform echo;          // unscaled convolve(playback, rir), padded
  double echo_gain = 1.0;
  double peak_scale = 1.0;
};

SynthesizedRecord make_mixture(const dsp::Waveform& clean, const dsp::Waveform& playback,
                               const Rir& rir, double snr_db);

struct DatasetOptions {
  std::uint64_t seed = 0;
  double snr_db = 0.0;
  int threads = 1;
  int sample_rate_hz = dsp::kDefaultSampleRate;
};

struct BuildReport {
  std::vector<MixtureRecord> records;
  std::vector<std::string> failures;  // "<id>: <reason>", does not abort the build
  std::filesystem::path manifest_path;
};

// For each clean utterance picks one interferer and one RIR uniformly at
// random (seeded) and emits a (mixture, text, clean) triple. Record count
// equals the clean-manifest count minus per-record failures.
BuildReport build_dataset(const std::filesystem::path& clean_manifest,
                          const std::filesystem::path& playback_manifest,
                          const RoomsSpec& rooms, const std::filesystem::path& out_dir,
                          const DatasetOptions& opts);

}  // namespace tec::synth
