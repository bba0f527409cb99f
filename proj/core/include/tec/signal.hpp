#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "tec/common.hpp"

namespace tec::dsp {

constexpr int kDefaultSampleRate = 16000;

/// Time-domain mono audio.
struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = kDefaultSampleRate;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return sample_rate_hz > 0 ? double(samples.size()) / sample_rate_hz : 0.0;
  }
};

double energy(const Waveform& w);
double peak_abs(const Waveform& w);
// Scales so that |sample| <= limit; returns the applied scale (1.0 if none).
double normalize_peak(Waveform& w, double limit = 1.0);
void check_finite(const Waveform& w, const char* what);

enum class MelNorm { kPeak, kArea };

struct SpectralConfig {
  double frame_length_ms = 50.0;
  double frame_shift_ms = 12.5;
  int fft_size = 0;  // 0 = next power of two >= frame length in samples
  int n_mels = 128;
  int n_mfcc = 13;
  double fmin_hz = 0.0;
  double fmax_hz = 0.0;  // 0 = Nyquist
  double log_floor = 1e-10;
  MelNorm mel_norm = MelNorm::kPeak;

  int frame_length_samples(int sample_rate_hz) const;
  int frame_shift_samples(int sample_rate_hz) const;
  int resolved_fft_size(int sample_rate_hz) const;
  double resolved_fmax(int sample_rate_hz) const;
  void validate(int sample_rate_hz) const;
};

/// T x n_mels log-Mel energies, bounded below by log(log_floor).
struct MelSpectrogram {
  Matrix values;
  SpectralConfig config;
  int sample_rate_hz = kDefaultSampleRate;
};

/// T x n_coeff cepstral coefficients; coefficient 0 (energy) is excluded.
struct MfccMatrix {
  Matrix values;
};

// Hann-windowed frames, one per row. Frame count floor((N - L)/S) + 1.
Matrix frame_signal(const Waveform& w, const SpectralConfig& cfg);

MelSpectrogram mel_spectrogram(const Waveform& w, const SpectralConfig& cfg);

// DCT-II (orthonormal) over the Mel axis; keeps coefficients
// 1 .. min(n_mfcc, n_mels - 1).
MfccMatrix mfcc(const MelSpectrogram& m);
MfccMatrix mfcc(const Waveform& w, const SpectralConfig& cfg);

// Full linear convolution, output length len(x) + len(h) - 1. Uses an FFT
// fast path for large inputs; both paths agree within 1e-9 (tested).
std::vector<double> convolve(const std::vector<double>& x,
                             const std::vector<double>& h);

struct DtwPath {
  std::vector<std::pair<std::size_t, std::size_t>> points;
  double cost = 0.0;
};

// Monotonic path (0,0) -> (Ta-1, Tb-1) minimizing cumulative Euclidean frame
// distance with steps {(1,0),(0,1),(1,1)}.
DtwPath dtw_align(const Matrix& a, const Matrix& b);

// Radix-2 complex FFT, in place. Size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

// Linear-interpolation resampler for ingestion of non-16k material.
Waveform resample_linear(const Waveform& w, int target_rate_hz);

// Mel scale: 2595 * log10(1 + f/700).
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filterbank, n_mels x (fft_size/2 + 1).
Matrix mel_filterbank(const SpectralConfig& cfg, int sample_rate_hz);

}  // namespace tec::dsp
