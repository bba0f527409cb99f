#include "tec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tec/wav.hpp"

namespace tec::metrics {

McdReport mcd_from_mfcc(const Matrix& enhanced, const Matrix& target) {
  require(!enhanced.empty() && !target.empty(), "mcd: empty input");
  require(enhanced.cols == target.cols, "mcd: coefficient count mismatch");

  const dsp::DtwPath path = dsp::dtw_align(enhanced, target);
  McdReport report;
  report.aligned_frames = path.points.size();
  const double k = 10.0 / std::log(10.0);
  for (const auto& [i, j] : path.points) {
    double s = 0.0;
    for (std::size_t d = 0; d < enhanced.cols; ++d) {
      const double diff = enhanced.at(i, d) - target.at(j, d);
      s += diff * diff;
    }
    report.total_db += k * std::sqrt(2.0 * s);
  }
  report.per_frame_db = report.total_db / double(report.aligned_frames);
  return report;
}

McdReport mcd(const dsp::MelSpectrogram& enhanced, const dsp::MelSpectrogram& target) {
  return mcd_from_mfcc(dsp::mfcc(enhanced).values, dsp::mfcc(target).values);
}

McdReport mcd(const dsp::Waveform& enhanced, const dsp::Waveform& target,
              const dsp::SpectralConfig& cfg) {
  return mcd(dsp::mel_spectrogram(enhanced, cfg), dsp::mel_spectrogram(target, cfg));
}

std::vector<std::string> tokenize_words(const std::string& line) {
  std::vector<std::string> words;
  std::istringstream in(line);
  std::string w;
  while (in >> w) {
    std::string cleaned;
    for (char c : w)
      if (std::isalnum(static_cast<unsigned char>(c)))
        cleaned += char(std::tolower(static_cast<unsigned char>(c)));
    if (!cleaned.empty()) words.push_back(cleaned);
  }
  return words;
}

double wer(const std::vector<std::string>& reference,
           const std::vector<std::string>& hypothesis) {
  require(!reference.empty(), "wer: empty reference");
  const std::size_t n = reference.size(), m = hypothesis.size();
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return double(prev[m]) / double(n);
}

FlopsReport flops_estimate(const model::ModelConfig& cfg, long t_x, long t_y, long t_z) {
  require(t_x >= 0 && t_y >= 0 && t_z >= 0, "flops: lengths must be non-negative");
  // instantiate the model once and count what was actually built
  model::TecModel counted(cfg, 0);
  auto& reg = counted.params();

  FlopsReport report;
  report.t_x = t_x;
  report.t_y = t_y;
  report.t_z = t_z;
  report.m_audio = double(reg.count_elements("audio_enc/"));
  switch (cfg.mode) {
    case model::Mode::kTec:
      report.m_text = double(reg.count_elements("text_enc/"));
      break;
    case model::Mode::kAecSeq2seq:
      report.m_text = double(reg.count_elements("audio_enc2/"));
      break;
    case model::Mode::kVanilla:
      report.m_text = 0.0;
      break;
  }
  report.m_dec = double(reg.count_elements("decoder/"));

  const double qx = double(reg.count_elements("attn_x/query_dense"));
  const double px = double(reg.count_elements("attn_x/context_proj"));
  report.flops_atten = px * double(t_x) + qx * double(t_z);
  if (cfg.mode != model::Mode::kVanilla) {
    const double qy = double(reg.count_elements("attn_y/query_dense"));
    const double py = double(reg.count_elements("attn_y/context_proj"));
    report.flops_atten += py * double(t_y) + qy * double(t_z);
  }

  report.total = report.m_audio * double(t_x) + report.m_text * double(t_y) +
                 report.m_dec * double(t_z) + report.flops_atten;
  return report;
}

std::size_t side_input_size(const synth::MixtureRecord& record, model::Mode mode,
                            const std::filesystem::path& manifest_dir) {
  switch (mode) {
    case model::Mode::kVanilla:
      return 0;
    case model::Mode::kTec: {
      require(!record.text.empty() && !record.phonemes.empty(),
              "side_input_size: record \"" + record.id + "\" has no source text");
      return record.phonemes.size();
    }
    case model::Mode::kAecSeq2seq:
      return dsp::wav_payload_bytes(manifest_dir / record.playback_path);
  }
  return 0;
}

}  // namespace tec::metrics
