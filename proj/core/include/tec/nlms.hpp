#pragma once

#include <cstddef>
#include <vector>

#include "tec/signal.hpp"

namespace tec::aec {

struct NlmsConfig {
  int filter_taps = 1024;
  double step_size_mu = 0.5;    // in (0, 2)
  double regularizer_eps = 1e-6;

  void validate() const;
};

/// Transversal filter state: weights plus the most recent reference samples,
/// newest first.
struct AdaptiveFilterState {
  std::vector<double> weights;
  std::vector<double> reference_buffer;

  explicit AdaptiveFilterState(int taps)
      : weights(taps, 0.0), reference_buffer(taps, 0.0) {}
};

// One sample of adaptation: y_hat = w.u, e = mic - y_hat,
// w += mu * e * u / (u.u + eps). Returns e, the enhanced sample.
// Throws when a weight turns non-finite, naming the diverging step.
double nlms_step(AdaptiveFilterState& state, double mic_sample, double ref_sample,
                 const NlmsConfig& cfg, std::size_t step_index = 0);

// Sample-wise NLMS over whole signals; inputs must share length and rate.
dsp::Waveform nlms_cancel(const dsp::Waveform& mixture, const dsp::Waveform& playback,
                          const NlmsConfig& cfg);

// Echo return loss enhancement of a segment: 10*log10(E_before / E_after).
double erle_db(const dsp::Waveform& before, const dsp::Waveform& after,
               std::size_t begin, std::size_t end);

}  // namespace tec::aec
