#include "tec/griffin_lim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace tec::dsp {

namespace {

using Spec = std::vector<std::vector<std::complex<double>>>;  // [T][n_fft]

std::vector<double> hann_window(int length) {
  std::vector<double> w(length, 1.0);
  if (length > 1)
    for (int n = 0; n < length; ++n)
      w[n] = 0.5 - 0.5 * std::cos(2.0 * M_PI * n / (length - 1));
  return w;
}

Waveform istft(const Spec& spec, int frame_len, int shift, int sample_rate) {
  const int n_fft = int(spec[0].size());
  const std::size_t n_out = (spec.size() - 1) * shift + frame_len;
  std::vector<double> acc(n_out, 0.0), norm(n_out, 1e-12);
  const auto win = hann_window(frame_len);

  std::vector<std::complex<double>> buf(n_fft);
  for (std::size_t f = 0; f < spec.size(); ++f) {
    buf = spec[f];
    fft_inplace(buf, true);
    for (int n = 0; n < frame_len; ++n) {
      acc[f * shift + n] += buf[n].real() * win[n];
      norm[f * shift + n] += win[n] * win[n];
    }
  }
  Waveform out;
  out.sample_rate_hz = sample_rate;
  out.samples.resize(n_out);
  for (std::size_t i = 0; i < n_out; ++i) out.samples[i] = acc[i] / norm[i];
  return out;
}

Spec stft(const Waveform& w, int frame_len, int shift, int n_fft) {
  const std::size_t n_frames =
      w.samples.size() >= std::size_t(frame_len)
          ? (w.samples.size() - frame_len) / shift + 1
          : 1;
  const auto win = hann_window(frame_len);
  Spec spec(n_frames, std::vector<std::complex<double>>(n_fft));
  for (std::size_t f = 0; f < n_frames; ++f) {
    for (int n = 0; n < n_fft; ++n) spec[f][n] = 0.0;
    for (int n = 0; n < frame_len && f * shift + n < w.samples.size(); ++n)
      spec[f][n] = w.samples[f * shift + n] * win[n];
    fft_inplace(spec[f], false);
  }
  return spec;
}

}  // namespace

Waveform griffin_lim(const MelSpectrogram& mel, int iterations) {
  require(!mel.values.empty(), "griffin_lim: empty mel input");
  const SpectralConfig& cfg = mel.config;
  const int sr = mel.sample_rate_hz;
  const int frame_len = cfg.frame_length_samples(sr);
  const int shift = cfg.frame_shift_samples(sr);
  const int n_fft = cfg.resolved_fft_size(sr);
  const int n_bins = n_fft / 2 + 1;

  // target linear magnitudes via a column-normalized filterbank transpose
  const Matrix fb = mel_filterbank(cfg, sr);
  std::vector<double> col_norm(n_bins, 1e-12);
  for (int m = 0; m < cfg.n_mels; ++m)
    for (int k = 0; k < n_bins; ++k) col_norm[k] += fb.at(m, k);

  const std::size_t T = mel.values.rows;
  Matrix target_mag(T, n_bins);
  for (std::size_t t = 0; t < T; ++t)
    for (int k = 0; k < n_bins; ++k) {
      double e = 0.0;
      for (int m = 0; m < cfg.n_mels; ++m)
        e += fb.at(m, k) * std::exp(mel.values.at(t, m));
      target_mag.at(t, k) = e / col_norm[k];
    }

  // start from zero phase and iterate
  Spec spec(T, std::vector<std::complex<double>>(n_fft));
  auto impose_magnitude = [&](Spec& s) {
    for (std::size_t t = 0; t < T && t < s.size(); ++t) {
      for (int k = 0; k < n_bins; ++k) {
        const double mag = target_mag.at(t, k);
        const double cur = std::abs(s[t][k]);
        std::complex<double> ph =
            cur > 1e-12 ? s[t][k] / cur : std::complex<double>(1.0, 0.0);
        s[t][k] = mag * ph;
        if (k > 0 && k < n_fft / 2) s[t][n_fft - k] = std::conj(s[t][k]);
      }
    }
  };
  impose_magnitude(spec);

  Waveform w;
  for (int it = 0; it < iterations; ++it) {
    w = istft(spec, frame_len, shift, sr);
    Spec re = stft(w, frame_len, shift, n_fft);
    re.resize(T, std::vector<std::complex<double>>(n_fft, {0.0, 0.0}));
    impose_magnitude(re);
    spec = std::move(re);
  }
  w = istft(spec, frame_len, shift, sr);
  normalize_peak(w, 0.95);
  return w;
}

}  // namespace tec::dsp
