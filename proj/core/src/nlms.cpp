#include "tec/nlms.hpp"

#include <cmath>

namespace tec::aec {

void NlmsConfig::validate() const {
  require(filter_taps >= 1, "nlms: filter_taps must be >= 1");
  require(step_size_mu > 0.0 && step_size_mu < 2.0, "nlms: step size must be in (0, 2)");
  require(regularizer_eps > 0.0, "nlms: regularizer must be positive");
}

double nlms_step(AdaptiveFilterState& state, double mic_sample, double ref_sample,
                 const NlmsConfig& cfg, std::size_t step_index) {
  const std::size_t taps = state.weights.size();
  // shift the reference buffer, newest sample first
  for (std::size_t i = taps - 1; i > 0; --i)
    state.reference_buffer[i] = state.reference_buffer[i - 1];
  state.reference_buffer[0] = ref_sample;

  double y_hat = 0.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < taps; ++i) {
    y_hat += state.weights[i] * state.reference_buffer[i];
    norm += state.reference_buffer[i] * state.reference_buffer[i];
  }
  const double e = mic_sample - y_hat;
  const double g = cfg.step_size_mu * e / (norm + cfg.regularizer_eps);
  for (std::size_t i = 0; i < taps; ++i) {
    state.weights[i] += g * state.reference_buffer[i];
    if (!std::isfinite(state.weights[i]))
      fail("nlms: filter diverged at step " + std::to_string(step_index));
  }
  return e;
}

dsp::Waveform nlms_cancel(const dsp::Waveform& mixture, const dsp::Waveform& playback,
                          const NlmsConfig& cfg) {
  cfg.validate();
  require(mixture.sample_rate_hz == playback.sample_rate_hz,
          "nlms_cancel: sample-rate mismatch");
  require(mixture.samples.size() == playback.samples.size(),
          "nlms_cancel: length mismatch (pad inputs first)");

  AdaptiveFilterState state(cfg.filter_taps);
  dsp::Waveform out;
  out.sample_rate_hz = mixture.sample_rate_hz;
  out.samples.resize(mixture.samples.size());
  for (std::size_t n = 0; n < mixture.samples.size(); ++n)
    out.samples[n] = nlms_step(state, mixture.samples[n], playback.samples[n], cfg, n);
  return out;
}

double erle_db(const dsp::Waveform& before, const dsp::Waveform& after,
               std::size_t begin, std::size_t end) {
  require(begin < end && end <= before.samples.size() && end <= after.samples.size(),
          "erle_db: bad segment bounds");
  double e_before = 0.0, e_after = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    e_before += before.samples[i] * before.samples[i];
    e_after += after.samples[i] * after.samples[i];
  }
  require(e_before > 0.0, "erle_db: reference segment has zero energy");
  if (e_after == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(e_before / e_after);
}

}  // namespace tec::aec
