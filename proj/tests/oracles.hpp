// Test-only reference implementations, kept deliberately naive and
// independent of the library code paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include "tec/common.hpp"

namespace oracle {

// O(N^2) DFT magnitude, one-sided.
inline std::vector<double> dft_magnitude(const std::vector<double>& frame, int n_fft) {
  std::vector<double> mag(n_fft / 2 + 1);
  for (int k = 0; k <= n_fft / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t n = 0; n < frame.size(); ++n) {
      const double ang = -2.0 * M_PI * k * double(n) / n_fft;
      re += frame[n] * std::cos(ang);
      im += frame[n] * std::sin(ang);
    }
    mag[k] = std::sqrt(re * re + im * im);
  }
  return mag;
}

inline std::vector<double> convolve_direct(const std::vector<double>& x,
                                           const std::vector<double>& h) {
  std::vector<double> out(x.size() + h.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < h.size(); ++j) out[i + j] += x[i] * h[j];
  return out;
}

// DCT-II with orthonormal scaling for k >= 1 (coefficient 0 dropped).
inline std::vector<double> dct_skip0(const std::vector<double>& mel, int n_keep) {
  const int n = int(mel.size());
  std::vector<double> out(n_keep, 0.0);
  for (int k = 1; k <= n_keep; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      acc += mel[i] * std::cos(M_PI * k * (2.0 * i + 1.0) / (2.0 * n));
    out[k - 1] = acc * std::sqrt(2.0 / n);
  }
  return out;
}

// Exhaustive DTW: enumerates every monotonic path with steps
// {(1,0),(0,1),(1,1)}; only usable for tiny inputs.
inline double dtw_exhaustive(const tec::Matrix& a, const tec::Matrix& b) {
  auto dist = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.cols; ++d) {
      const double diff = a.at(i, d) - b.at(j, d);
      s += diff * diff;
    }
    return std::sqrt(s);
  };
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk =
      [&](std::size_t i, std::size_t j, double cost) {
        cost += dist(i, j);
        if (cost >= best) return;
        if (i + 1 == a.rows && j + 1 == b.rows) {
          best = std::min(best, cost);
          return;
        }
        if (i + 1 < a.rows && j + 1 < b.rows) walk(i + 1, j + 1, cost);
        if (i + 1 < a.rows) walk(i + 1, j, cost);
        if (j + 1 < b.rows) walk(i, j + 1, cost);
      };
  walk(0, 0, 0.0);
  return best;
}

// Exhaustive DTW that also evaluates a per-pair frame cost, for the MCD
// oracle (returns the minimum summed cost over all paths).
inline double dtw_exhaustive_cost(
    const tec::Matrix& a, const tec::Matrix& b,
    const std::function<double(std::size_t, std::size_t)>& pair_cost) {
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk =
      [&](std::size_t i, std::size_t j, double cost) {
        cost += pair_cost(i, j);
        if (cost >= best) return;
        if (i + 1 == a.rows && j + 1 == b.rows) {
          best = std::min(best, cost);
          return;
        }
        if (i + 1 < a.rows && j + 1 < b.rows) walk(i + 1, j + 1, cost);
        if (i + 1 < a.rows) walk(i + 1, j, cost);
        if (j + 1 < b.rows) walk(i, j + 1, cost);
      };
  walk(0, 0, 0.0);
  return best;
}

// Independent image-source enumeration: explicit triple loop over lattice
// cells, counting wall crossings from the cell index.
struct ImageTap {
  std::size_t delay;
  double amp;
};

inline std::vector<double> image_source_taps(const std::array<double, 3>& room,
                                             const std::array<double, 3>& src,
                                             const std::array<double, 3>& mic,
                                             double absorption, int max_order, double c,
                                             int sample_rate) {
  std::vector<ImageTap> taps;
  const int span = max_order + 2;
  for (int cx = -span; cx <= span; ++cx)
    for (int cy = -span; cy <= span; ++cy)
      for (int cz = -span; cz <= span; ++cz) {
        // cell index k along an axis: coordinate = k*L + (k even ? s : L - s)
        auto coord = [](int k, double L, double s) {
          return double(k) * L + ((k % 2 + 2) % 2 == 0 ? s : L - s);
        };
        const int refl = std::abs(cx) + std::abs(cy) + std::abs(cz);
        if (refl > max_order) continue;
        const double ix = coord(cx, room[0], src[0]);
        const double iy = coord(cy, room[1], src[1]);
        const double iz = coord(cz, room[2], src[2]);
        const double d = std::sqrt((ix - mic[0]) * (ix - mic[0]) +
                                   (iy - mic[1]) * (iy - mic[1]) +
                                   (iz - mic[2]) * (iz - mic[2]));
        const double amp = std::pow(1.0 - absorption, refl) / d;
        if (amp == 0.0) continue;
        taps.push_back({std::size_t(std::lround(d / c * sample_rate)), amp});
      }
  std::size_t max_delay = 0;
  for (const auto& t : taps) max_delay = std::max(max_delay, t.delay);
  std::vector<double> h(max_delay + 1, 0.0);
  for (const auto& t : taps) h[t.delay] += t.amp;
  return h;
}

// Brute-force edit distance by recursive enumeration (no DP).
inline int edit_distance_enum(const std::vector<std::string>& ref,
                              const std::vector<std::string>& hyp, std::size_t i = 0,
                              std::size_t j = 0) {
  if (i == ref.size()) return int(hyp.size() - j);
  if (j == hyp.size()) return int(ref.size() - i);
  const int match = edit_distance_enum(ref, hyp, i + 1, j + 1) + (ref[i] == hyp[j] ? 0 : 1);
  const int del = edit_distance_enum(ref, hyp, i + 1, j) + 1;
  const int ins = edit_distance_enum(ref, hyp, i, j + 1) + 1;
  return std::min({match, del, ins});
}

// Central finite differences through an arbitrary scalar function.
inline double central_difference(const std::function<double()>& eval, double& slot,
                                 double h = 1e-4) {
  const double saved = slot;
  slot = saved + h;
  const double up = eval();
  slot = saved - h;
  const double down = eval();
  slot = saved;
  return (up - down) / (2.0 * h);
}

// SAME-padded nested-loop convolutions.
inline std::vector<double> conv2d_same(const std::vector<double>& x, int H, int W, int Ci,
                                       const std::vector<double>& k, int Kh, int Kw, int Co,
                                       int sh, int sw) {
  const int out_h = (H + sh - 1) / sh;
  const int out_w = (W + sw - 1) / sw;
  const int pad_h = std::max(0, ((out_h - 1) * sh + Kh - H) / 2);
  const int pad_w = std::max(0, ((out_w - 1) * sw + Kw - W) / 2);
  std::vector<double> y(std::size_t(out_h) * out_w * Co, 0.0);
  for (int oh = 0; oh < out_h; ++oh)
    for (int ow = 0; ow < out_w; ++ow)
      for (int o = 0; o < Co; ++o) {
        double acc = 0.0;
        for (int a = 0; a < Kh; ++a)
          for (int b = 0; b < Kw; ++b)
            for (int c = 0; c < Ci; ++c) {
              const int ih = oh * sh + a - pad_h;
              const int iw = ow * sw + b - pad_w;
              if (ih < 0 || ih >= H || iw < 0 || iw >= W) continue;
              acc += x[std::size_t(ih * W + iw) * Ci + c] *
                     k[std::size_t(((a * Kw + b) * Ci + c)) * Co + o];
            }
        y[std::size_t(oh * out_w + ow) * Co + o] = acc;
      }
  return y;
}

inline std::vector<double> conv1d_same(const std::vector<double>& x, int T, int Ci,
                                       const std::vector<double>& k, int K, int Co,
                                       int stride) {
  return conv2d_same(x, T, 1, Ci, k, K, 1, Co, stride, 1);
}

}  // namespace oracle
