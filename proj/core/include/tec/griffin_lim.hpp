#pragma once

#include "tec/signal.hpp"

namespace tec::dsp {

// Rough waveform reconstruction from a log-Mel matrix for listening checks
// only: pseudo-inverse of the filterbank followed by iterative phase
// estimation. Not part of any quality metric.
Waveform griffin_lim(const MelSpectrogram& mel, int iterations = 32);

}  // namespace tec::dsp
