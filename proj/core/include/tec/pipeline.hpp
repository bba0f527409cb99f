#pragma once

#include <filesystem>
#include <string>

#include "tec/corpus.hpp"
#include "tec/metrics.hpp"
#include "tec/synth.hpp"
#include "tec/train.hpp"

namespace tec::pipeline {

// Feature settings used at the two scales. table1() mirrors the full-size
// spectral analysis row; toy() matches the toy model width.
dsp::SpectralConfig spectral_table1();
dsp::SpectralConfig spectral_toy();

model::TrainConfig toy_train_config(long steps, std::uint64_t seed);

// Builds a teacher-forcing item from a generated mixture record.
model::TrainItem item_from_record(const synth::MixtureRecord& record,
                                  const std::filesystem::path& manifest_dir,
                                  const dsp::SpectralConfig& spectral, bool want_playback);

// Reproducibility echo written by every subcommand.
void write_run_meta(const std::filesystem::path& out_dir, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& options);

struct DemoOptions {
  std::uint64_t seed = 7;
  int threads = 1;
  long train_steps = 200;
  std::filesystem::path out_dir;
};

struct DemoResult {
  std::filesystem::path report_path;
  std::string report_text;
  double mcd_mixture = 0.0;
  double mcd_nlms = 0.0;
  double mcd_vanilla = 0.0;
  double mcd_tec = 0.0;
};

// The interrupted-query scenario at desk scale: synthesizes mixtures from the
// bundled corpus, then reports MCD against the clean target for the raw
// mixture, the NLMS baseline, and overfit VANILLA / TEC models.
DemoResult run_demo(const DemoOptions& opts);

}  // namespace tec::pipeline
