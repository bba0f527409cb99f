#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tec/manifest.hpp"
#include "tec/model.hpp"
#include "tec/signal.hpp"

namespace tec::metrics {

struct McdReport {
  double total_db = 0.0;      // (10/ln10) * sum_t sqrt(2 * sum_d diff^2)
  double per_frame_db = 0.0;  // total / aligned path length
  std::size_t aligned_frames = 0;
};

// DTW-aligns the two MFCC sequences, then accumulates the cepstral distance
// along the path.
McdReport mcd_from_mfcc(const Matrix& enhanced, const Matrix& target);
McdReport mcd(const dsp::MelSpectrogram& enhanced, const dsp::MelSpectrogram& target);
McdReport mcd(const dsp::Waveform& enhanced, const dsp::Waveform& target,
              const dsp::SpectralConfig& cfg);

// (S + D + I) / N over word tokens via Levenshtein alignment.
double wer(const std::vector<std::string>& reference, const std::vector<std::string>& hypothesis);
std::vector<std::string> tokenize_words(const std::string& line);

struct FlopsReport {
  double m_audio = 0.0;  // trainable parameter counts per component
  double m_text = 0.0;
  double m_dec = 0.0;
  long t_x = 0, t_y = 0, t_z = 0;
  double flops_atten = 0.0;
  double total = 0.0;  // m_audio*t_x + m_text*t_y + m_dec*t_z + flops_atten
};

// Parameter-count cost model. The attention term charges each source's
// projection matrix once per source position and each query matrix once per
// decoding step. In AEC-Seq2seq mode the playback encoder fills the t_y slot.
FlopsReport flops_estimate(const model::ModelConfig& cfg, long t_x, long t_y, long t_z);

// Side-input accounting: TEC sends the serialized phoneme string, the AEC
// modes send the playback audio payload, VANILLA sends nothing.
std::size_t side_input_size(const synth::MixtureRecord& record, model::Mode mode,
                            const std::filesystem::path& manifest_dir);

}  // namespace tec::metrics
