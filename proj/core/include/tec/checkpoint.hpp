#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "tec/container.hpp"
#include "tec/layers.hpp"
#include "tec/signal.hpp"

namespace tec::nn {

// "TECK" checkpoints hold every parameter and buffer by name plus scalar
// "meta/<key>" records, which make the file self-describing: a model can be
// rebuilt from the checkpoint alone.
void save_checkpoint(const std::filesystem::path& path, ParamRegistry& params,
                     const std::map<std::string, double>& meta);

struct LoadedCheckpoint {
  std::map<std::string, double> meta;
  std::vector<io::ArrayRecord> arrays;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

// Fills an existing registry from loaded arrays; shapes must match.
void restore_params(ParamRegistry& params, const LoadedCheckpoint& ckpt);

}  // namespace tec::nn

namespace tec::dsp {

// Mel matrices persist in the same container format with a "MEL1" magic,
// carrying the spectral settings needed to interpret them.
void save_mel(const std::filesystem::path& path, const MelSpectrogram& mel);
MelSpectrogram load_mel(const std::filesystem::path& path);

}  // namespace tec::dsp
