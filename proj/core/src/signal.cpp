#include "tec/signal.hpp"

#include <algorithm>
#include <cmath>

namespace tec::dsp {

double energy(const Waveform& w) {
  double e = 0.0;
  for (double s : w.samples) e += s * s;
  return e;
}

double peak_abs(const Waveform& w) {
  double p = 0.0;
  for (double s : w.samples) p = std::max(p, std::fabs(s));
  return p;
}

double normalize_peak(Waveform& w, double limit) {
  double p = peak_abs(w);
  if (p <= limit || p == 0.0) return 1.0;
  double scale = limit / p;
  for (double& s : w.samples) s *= scale;
  return scale;
}

void check_finite(const Waveform& w, const char* what) {
  for (double s : w.samples) {
    if (!std::isfinite(s)) fail(std::string(what) + ": non-finite sample");
  }
}

int SpectralConfig::frame_length_samples(int sample_rate_hz) const {
  return int(std::lround(frame_length_ms * sample_rate_hz / 1000.0));
}

int SpectralConfig::frame_shift_samples(int sample_rate_hz) const {
  return int(std::lround(frame_shift_ms * sample_rate_hz / 1000.0));
}

int SpectralConfig::resolved_fft_size(int sample_rate_hz) const {
  if (fft_size > 0) return fft_size;
  int L = frame_length_samples(sample_rate_hz);
  int n = 1;
  while (n < L) n <<= 1;
  return n;
}

double SpectralConfig::resolved_fmax(int sample_rate_hz) const {
  return fmax_hz > 0.0 ? fmax_hz : sample_rate_hz / 2.0;
}

void SpectralConfig::validate(int sample_rate_hz) const {
  require(sample_rate_hz > 0, "spectral config: sample rate must be positive");
  require(frame_length_ms > 0 && frame_shift_ms > 0,
          "spectral config: frame length/shift must be positive");
  require(frame_shift_ms <= frame_length_ms,
          "spectral config: frame shift must not exceed frame length");
  int L = frame_length_samples(sample_rate_hz);
  require(resolved_fft_size(sample_rate_hz) >= L,
          "spectral config: fft size smaller than frame length");
  double fmax = resolved_fmax(sample_rate_hz);
  require(fmin_hz >= 0.0 && fmin_hz < fmax && fmax <= sample_rate_hz / 2.0,
          "spectral config: need 0 <= fmin < fmax <= Nyquist");
  require(n_mels > 0 && n_mfcc > 0, "spectral config: n_mels/n_mfcc must be positive");
  require(log_floor > 0.0, "spectral config: log floor must be positive");
}

Matrix frame_signal(const Waveform& w, const SpectralConfig& cfg) {
  cfg.validate(w.sample_rate_hz);
  const int L = cfg.frame_length_samples(w.sample_rate_hz);
  const int S = cfg.frame_shift_samples(w.sample_rate_hz);
  const std::size_t N = w.samples.size();
  if (N < std::size_t(L))
    fail("frame_signal: input too short (" + std::to_string(N) + " samples < frame length " +
         std::to_string(L) + ")");

  const std::size_t n_frames = (N - L) / S + 1;
  // symmetric Hann window
  std::vector<double> win(L, 1.0);
  if (L > 1) {
    for (int n = 0; n < L; ++n)
      win[n] = 0.5 - 0.5 * std::cos(2.0 * M_PI * n / (L - 1));
  }
  Matrix frames(n_frames, L);
  for (std::size_t f = 0; f < n_frames; ++f) {
    const double* src = w.samples.data() + f * S;
    double* dst = frames.row(f);
    for (int n = 0; n < L; ++n) dst[n] = src[n] * win[n];
  }
  return frames;
}

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  require((n & (n - 1)) == 0 && n > 0, "fft: size must be a power of two");
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * M_PI / double(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    for (auto& x : a) x /= double(n);
  }
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Matrix mel_filterbank(const SpectralConfig& cfg, int sample_rate_hz) {
  const int n_fft = cfg.resolved_fft_size(sample_rate_hz);
  const int n_bins = n_fft / 2 + 1;
  const double fmin = cfg.fmin_hz;
  const double fmax = cfg.resolved_fmax(sample_rate_hz);

  std::vector<double> edges(cfg.n_mels + 2);
  const double mel_lo = hz_to_mel(fmin), mel_hi = hz_to_mel(fmax);
  for (int i = 0; i < cfg.n_mels + 2; ++i)
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1));

  Matrix fb(cfg.n_mels, n_bins);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double f0 = edges[m], f1 = edges[m + 1], f2 = edges[m + 2];
    for (int k = 0; k < n_bins; ++k) {
      const double f = double(k) * sample_rate_hz / n_fft;
      double w = 0.0;
      if (f > f0 && f < f1 && f1 > f0)
        w = (f - f0) / (f1 - f0);
      else if (f >= f1 && f < f2 && f2 > f1)
        w = (f2 - f) / (f2 - f1);
      if (cfg.mel_norm == MelNorm::kArea && f2 > f0) w *= 2.0 / (f2 - f0);
      fb.at(m, k) = w;
    }
  }
  return fb;
}

MelSpectrogram mel_spectrogram(const Waveform& w, const SpectralConfig& cfg) {
  Matrix frames = frame_signal(w, cfg);
  const int n_fft = cfg.resolved_fft_size(w.sample_rate_hz);
  const int n_bins = n_fft / 2 + 1;
  Matrix fb = mel_filterbank(cfg, w.sample_rate_hz);

  MelSpectrogram out;
  out.config = cfg;
  out.sample_rate_hz = w.sample_rate_hz;
  out.values = Matrix(frames.rows, cfg.n_mels);

  std::vector<std::complex<double>> buf(n_fft);
  std::vector<double> mag(n_bins);
  for (std::size_t f = 0; f < frames.rows; ++f) {
    std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
    const double* src = frames.row(f);
    for (std::size_t n = 0; n < frames.cols; ++n) buf[n] = src[n];
    fft_inplace(buf, false);
    for (int k = 0; k < n_bins; ++k) mag[k] = std::abs(buf[k]);
    for (int m = 0; m < cfg.n_mels; ++m) {
      double e = 0.0;
      const double* fbr = fb.row(m);
      for (int k = 0; k < n_bins; ++k) e += fbr[k] * mag[k];
      out.values.at(f, m) = std::log(std::max(e, cfg.log_floor));
    }
  }
  return out;
}

MfccMatrix mfcc(const MelSpectrogram& m) {
  require(!m.values.empty(), "mfcc: empty mel spectrogram");
  const int n_mels = int(m.values.cols);
  const int n_keep = std::min(m.config.n_mfcc, n_mels - 1);
  require(n_keep >= 1, "mfcc: need at least 2 mel bins");

  // DCT-II basis for coefficients 1..n_keep, orthonormal scaling sqrt(2/N)
  Matrix basis(n_keep, n_mels);
  const double scale = std::sqrt(2.0 / n_mels);
  for (int k = 1; k <= n_keep; ++k)
    for (int n = 0; n < n_mels; ++n)
      basis.at(k - 1, n) = scale * std::cos(M_PI * k * (2.0 * n + 1.0) / (2.0 * n_mels));

  MfccMatrix out;
  out.values = Matrix(m.values.rows, n_keep);
  for (std::size_t t = 0; t < m.values.rows; ++t) {
    const double* mel = m.values.row(t);
    for (int k = 0; k < n_keep; ++k) {
      double acc = 0.0;
      const double* b = basis.row(k);
      for (int n = 0; n < n_mels; ++n) acc += b[n] * mel[n];
      out.values.at(t, k) = acc;
    }
  }
  return out;
}

MfccMatrix mfcc(const Waveform& w, const SpectralConfig& cfg) {
  return mfcc(mel_spectrogram(w, cfg));
}

namespace {

std::vector<double> convolve_direct(const std::vector<double>& x,
                                    const std::vector<double>& h) {
  std::vector<double> out(x.size() + h.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < h.size(); ++j) out[i + j] += xi * h[j];
  }
  return out;
}

std::vector<double> convolve_fft(const std::vector<double>& x,
                                 const std::vector<double>& h) {
  const std::size_t out_len = x.size() + h.size() - 1;
  std::size_t n = 1;
  while (n < out_len) n <<= 1;
  std::vector<std::complex<double>> a(n), b(n);
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = x[i];
  for (std::size_t i = 0; i < h.size(); ++i) b[i] = h[i];
  fft_inplace(a, false);
  fft_inplace(b, false);
  for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
  fft_inplace(a, true);
  std::vector<double> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = a[i].real();
  return out;
}

}  // namespace

std::vector<double> convolve(const std::vector<double>& x,
                             const std::vector<double>& h) {
  require(!x.empty() && !h.empty(), "convolve: empty input");
  // The direct path wins below ~256k multiply-adds.
  if (double(x.size()) * double(h.size()) > 262144.0) return convolve_fft(x, h);
  return convolve_direct(x, h);
}

DtwPath dtw_align(const Matrix& a, const Matrix& b) {
  require(!a.empty() && !b.empty(), "dtw_align: empty input");
  require(a.cols == b.cols, "dtw_align: dimension mismatch");
  const std::size_t Ta = a.rows, Tb = b.rows, D = a.cols;

  auto dist = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    const double* pa = a.row(i);
    const double* pb = b.row(j);
    for (std::size_t d = 0; d < D; ++d) {
      const double diff = pa[d] - pb[d];
      s += diff * diff;
    }
    return std::sqrt(s);
  };

  const double inf = std::numeric_limits<double>::infinity();
  Matrix acc(Ta, Tb, inf);
  std::vector<std::uint8_t> from(Ta * Tb, 0);  // 0 diag, 1 up(i-1), 2 left(j-1)
  for (std::size_t i = 0; i < Ta; ++i) {
    for (std::size_t j = 0; j < Tb; ++j) {
      const double d = dist(i, j);
      if (i == 0 && j == 0) {
        acc.at(0, 0) = d;
        continue;
      }
      double best = inf;
      std::uint8_t arg = 0;
      if (i > 0 && j > 0 && acc.at(i - 1, j - 1) < best) {
        best = acc.at(i - 1, j - 1);
        arg = 0;
      }
      if (i > 0 && acc.at(i - 1, j) < best) {
        best = acc.at(i - 1, j);
        arg = 1;
      }
      if (j > 0 && acc.at(i, j - 1) < best) {
        best = acc.at(i, j - 1);
        arg = 2;
      }
      acc.at(i, j) = best + d;
      from[i * Tb + j] = arg;
    }
  }

  DtwPath path;
  path.cost = acc.at(Ta - 1, Tb - 1);
  std::size_t i = Ta - 1, j = Tb - 1;
  path.points.emplace_back(i, j);
  while (i != 0 || j != 0) {
    switch (from[i * Tb + j]) {
      case 0:
        if (i > 0) --i;
        if (j > 0) --j;
        break;
      case 1:
        --i;
        break;
      default:
        --j;
        break;
    }
    path.points.emplace_back(i, j);
  }
  std::reverse(path.points.begin(), path.points.end());
  return path;
}

Waveform resample_linear(const Waveform& w, int target_rate_hz) {
  require(target_rate_hz > 0, "resample: target rate must be positive");
  if (w.sample_rate_hz == target_rate_hz || w.samples.empty()) {
    Waveform out = w;
    out.sample_rate_hz = target_rate_hz;
    return out;
  }
  const double ratio = double(target_rate_hz) / w.sample_rate_hz;
  const std::size_t n_out = std::size_t(std::floor((w.samples.size() - 1) * ratio)) + 1;
  Waveform out;
  out.sample_rate_hz = target_rate_hz;
  out.samples.resize(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    const double pos = double(i) / ratio;
    const std::size_t i0 = std::size_t(pos);
    const double frac = pos - double(i0);
    const double s0 = w.samples[std::min(i0, w.samples.size() - 1)];
    const double s1 = w.samples[std::min(i0 + 1, w.samples.size() - 1)];
    out.samples[i] = s0 + (s1 - s0) * frac;
  }
  return out;
}

}  // namespace tec::dsp
