#include "tec/checkpoint.hpp"

namespace tec::nn {

namespace {
constexpr char kCheckpointMagic[4] = {'T', 'E', 'C', 'K'};
constexpr char kMelMagic[4] = {'M', 'E', 'L', '1'};
}  // namespace

void save_checkpoint(const std::filesystem::path& path, ParamRegistry& params,
                     const std::map<std::string, double>& meta) {
  std::vector<io::ArrayRecord> records;
  for (const auto& [key, value] : meta)
    records.push_back({"meta/" + key, {1}, {value}});
  for (Parameter* p : params.all()) {
    io::ArrayRecord rec;
    rec.name = p->name;
    for (auto d : p->tensor.shape()) rec.dims.push_back(std::uint64_t(d));
    rec.data = p->tensor.data();
    records.push_back(std::move(rec));
  }
  io::write_container(path, kCheckpointMagic, records);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  LoadedCheckpoint out;
  for (auto& rec : io::read_container(path, kCheckpointMagic)) {
    if (rec.name.rfind("meta/", 0) == 0 && rec.data.size() == 1) {
      out.meta[rec.name.substr(5)] = rec.data[0];
    } else {
      out.arrays.push_back(std::move(rec));
    }
  }
  return out;
}

void restore_params(ParamRegistry& params, const LoadedCheckpoint& ckpt) {
  std::size_t restored = 0;
  for (const auto& rec : ckpt.arrays) {
    Parameter* p = params.find(rec.name);
    require(p != nullptr, "checkpoint: unexpected record \"" + rec.name + "\"");
    require(rec.data.size() == p->tensor.data().size(),
            "checkpoint: size mismatch for \"" + rec.name + "\"");
    p->tensor.data() = rec.data;
    ++restored;
  }
  require(restored == params.all().size(),
          "checkpoint: restored " + std::to_string(restored) + " of " +
              std::to_string(params.all().size()) + " parameters");
}

}  // namespace tec::nn

namespace tec::dsp {

namespace {
constexpr char kMelMagic2[4] = {'M', 'E', 'L', '1'};
}

void save_mel(const std::filesystem::path& path, const MelSpectrogram& mel) {
  std::vector<io::ArrayRecord> records;
  records.push_back({"mel", {mel.values.rows, mel.values.cols}, mel.values.v});
  auto scalar = [&](const char* name, double v) {
    records.push_back({name, {1}, {v}});
  };
  scalar("meta/sample_rate_hz", double(mel.sample_rate_hz));
  scalar("meta/frame_length_ms", mel.config.frame_length_ms);
  scalar("meta/frame_shift_ms", mel.config.frame_shift_ms);
  scalar("meta/fft_size", double(mel.config.fft_size));
  scalar("meta/n_mels", double(mel.config.n_mels));
  scalar("meta/n_mfcc", double(mel.config.n_mfcc));
  scalar("meta/fmin_hz", mel.config.fmin_hz);
  scalar("meta/fmax_hz", mel.config.fmax_hz);
  scalar("meta/log_floor", mel.config.log_floor);
  scalar("meta/mel_norm", mel.config.mel_norm == MelNorm::kArea ? 1.0 : 0.0);
  io::write_container(path, kMelMagic2, records);
}

MelSpectrogram load_mel(const std::filesystem::path& path) {
  MelSpectrogram mel;
  bool have_values = false;
  for (const auto& rec : io::read_container(path, kMelMagic2)) {
    if (rec.name == "mel") {
      require(rec.dims.size() == 2, "mel file: values must be rank 2");
      mel.values.rows = rec.dims[0];
      mel.values.cols = rec.dims[1];
      mel.values.v = rec.data;
      have_values = true;
    } else if (rec.data.size() == 1) {
      const double v = rec.data[0];
      if (rec.name == "meta/sample_rate_hz") mel.sample_rate_hz = int(v);
      else if (rec.name == "meta/frame_length_ms") mel.config.frame_length_ms = v;
      else if (rec.name == "meta/frame_shift_ms") mel.config.frame_shift_ms = v;
      else if (rec.name == "meta/fft_size") mel.config.fft_size = int(v);
      else if (rec.name == "meta/n_mels") mel.config.n_mels = int(v);
      else if (rec.name == "meta/n_mfcc") mel.config.n_mfcc = int(v);
      else if (rec.name == "meta/fmin_hz") mel.config.fmin_hz = v;
      else if (rec.name == "meta/fmax_hz") mel.config.fmax_hz = v;
      else if (rec.name == "meta/log_floor") mel.config.log_floor = v;
      else if (rec.name == "meta/mel_norm")
        mel.config.mel_norm = v == 1.0 ? MelNorm::kArea : MelNorm::kPeak;
    }
  }
  require(have_values, "mel file: missing values record in " + path.string());
  require(std::size_t(mel.config.n_mels) == mel.values.cols,
          "mel file: n_mels disagrees with matrix width");
  return mel;
}

}  // namespace tec::dsp
