#include "tec/pipeline.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "tec/parallel.hpp"
#include "tec/wav.hpp"

namespace tec::pipeline {

namespace fs = std::filesystem;

dsp::SpectralConfig spectral_table1() {
  dsp::SpectralConfig cfg;  // 50 ms / 12.5 ms / 128 mels are the defaults
  return cfg;
}

dsp::SpectralConfig spectral_toy() {
  dsp::SpectralConfig cfg;
  cfg.n_mels = 8;
  return cfg;
}

model::TrainConfig toy_train_config(long steps, std::uint64_t seed) {
  model::TrainConfig cfg;
  cfg.steps = steps;
  cfg.batch_size = 1;
  cfg.seed = seed;
  // the full-scale schedule shape, rebased for a few hundred toy steps
  cfg.lr.initial = 2e-3;
  cfg.lr.final_lr = 2e-4;
  cfg.lr.decay_steps = 2000;
  return cfg;
}

model::TrainItem item_from_record(const synth::MixtureRecord& record,
                                  const fs::path& manifest_dir,
                                  const dsp::SpectralConfig& spectral, bool want_playback) {
  model::TrainItem item;
  item.id = record.id;
  const dsp::Waveform mixture = dsp::read_wav(manifest_dir / record.mixture_path);
  const dsp::Waveform clean = dsp::read_wav(manifest_dir / record.clean_path);
  item.mixture_mel = dsp::mel_spectrogram(mixture, spectral).values;
  item.target_mel = dsp::mel_spectrogram(clean, spectral).values;
  item.text_ids = text::parse_phonemes(record.phonemes).ids;
  if (want_playback) {
    const dsp::Waveform playback = dsp::read_wav(manifest_dir / record.playback_path);
    item.playback_mel = dsp::mel_spectrogram(playback, spectral).values;
  }
  return item;
}

void write_run_meta(const fs::path& out_dir, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& options) {
  fs::create_directories(out_dir);
  nlohmann::ordered_json j;
  j["command"] = command;
  nlohmann::ordered_json opts;
  for (const auto& [k, v] : options) opts[k] = v;
  j["options"] = opts;
  std::ofstream out(out_dir / "run.meta");
  require(out.good(), "run.meta: cannot write to " + (out_dir / "run.meta").string());
  out << j.dump(2) << "\n";
}

namespace {

const corpus::Utterance kDemoClean[] = {
    {"clean00", "what about tomorrow"},
    {"clean05", "next song"},
};
const corpus::Utterance kDemoPlayback[] = {
    {"play04", "today is sunny"},
    {"play05", "there are two new messages"},
};

void write_demo_manifests(const fs::path& corpus_base) {
  auto subset = [&](const corpus::Utterance* utts, std::size_t n, const std::string& name) {
    std::vector<synth::UtteranceEntry> entries;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string rel = "wav/" + utts[i].id + ".wav";
      if (!fs::exists(corpus_base / rel))
        dsp::write_wav(corpus_base / rel, corpus::synth_utterance(utts[i].text, hash64(utts[i].id)));
      entries.push_back({utts[i].id, rel, utts[i].text});
    }
    synth::write_utterance_manifest(corpus_base / name, entries);
  };
  subset(kDemoClean, std::size(kDemoClean), "demo_clean.jsonl");
  subset(kDemoPlayback, std::size(kDemoPlayback), "demo_playback.jsonl");
}

double average_mcd(const std::vector<metrics::McdReport>& reports) {
  double sum = 0.0;
  for (const auto& r : reports) sum += r.per_frame_db;
  return sum / double(reports.size());
}

}  // namespace

DemoResult run_demo(const DemoOptions& opts) {
  require(!opts.out_dir.empty(), "demo: output directory required");
  fs::create_directories(opts.out_dir);

  const fs::path corpus_base = corpus::corpus_dir(opts.out_dir / "corpus");
  corpus::ensure_corpus(corpus_base);
  write_demo_manifests(corpus_base);

  synth::RoomsSpec rooms;
  rooms.count = 2;
  rooms.max_order = 1;

  synth::DatasetOptions ds;
  ds.seed = split_seed(opts.seed, "mix");
  ds.threads = opts.threads;
  const synth::BuildReport built =
      synth::build_dataset(corpus_base / "demo_clean.jsonl", corpus_base / "demo_playback.jsonl",
                           rooms, opts.out_dir / "mixtures", ds);
  require(built.failures.empty(), "demo: dataset build failed: " +
                                      (built.failures.empty() ? "" : built.failures[0]));
  const fs::path mix_dir = opts.out_dir / "mixtures";
  const dsp::SpectralConfig spectral = spectral_toy();

  const std::size_t n = built.records.size();
  std::vector<dsp::Waveform> mixtures(n), cleans(n), playbacks(n);
  std::vector<dsp::MelSpectrogram> clean_mels(n);
  std::vector<metrics::McdReport> mcd_mixture(n), mcd_nlms(n);

  parallel_for(n, opts.threads, [&](std::size_t i) {
    const auto& rec = built.records[i];
    mixtures[i] = dsp::read_wav(mix_dir / rec.mixture_path);
    cleans[i] = dsp::read_wav(mix_dir / rec.clean_path);
    playbacks[i] = dsp::read_wav(mix_dir / rec.playback_path);
    clean_mels[i] = dsp::mel_spectrogram(cleans[i], spectral);
    mcd_mixture[i] = metrics::mcd(dsp::mel_spectrogram(mixtures[i], spectral), clean_mels[i]);

    auto [mix_padded, play_padded] = synth::pad_to_equal_length(mixtures[i], playbacks[i]);
    aec::NlmsConfig nlms_cfg;
    const dsp::Waveform enhanced = aec::nlms_cancel(mix_padded, play_padded, nlms_cfg);
    mcd_nlms[i] = metrics::mcd(dsp::mel_spectrogram(enhanced, spectral), clean_mels[i]);
  });

  std::vector<model::TrainItem> items;
  for (const auto& rec : built.records)
    items.push_back(item_from_record(rec, mix_dir, spectral, false));

  auto train_and_score = [&](model::Mode mode, const char* tag) {
    model::ModelConfig cfg = model::ModelConfig::toy(text::vocab_size());
    cfg.mode = mode;
    model::TecModel net(cfg, split_seed(opts.seed, std::string("model/") + tag));
    model::Trainer trainer(net,
                           toy_train_config(opts.train_steps, split_seed(opts.seed, tag)));
    trainer.run(items);

    std::vector<metrics::McdReport> reports(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
      model::ModelInput input;
      input.mixture_mel = &items[i].mixture_mel;
      input.text_ids = items[i].text_ids;
      model::TecModel::InferResult out = net.infer(input);
      dsp::MelSpectrogram enhanced;
      enhanced.values = out.mel;
      enhanced.config = spectral;
      enhanced.sample_rate_hz = cleans[i].sample_rate_hz;
      reports[i] = metrics::mcd(enhanced, clean_mels[i]);
    }
    return average_mcd(reports);
  };

  DemoResult result;
  result.mcd_mixture = average_mcd(mcd_mixture);
  result.mcd_nlms = average_mcd(mcd_nlms);
  result.mcd_vanilla = train_and_score(model::Mode::kVanilla, "vanilla");
  result.mcd_tec = train_and_score(model::Mode::kTec, "tec");

  std::string ids;
  for (const auto& rec : built.records) {
    if (!ids.empty()) ids += ", ";
    ids += rec.id;
  }
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "TEC demo report\n"
                "seed=%llu\n"
                "records=%zu (%s)\n"
                "mcd_per_frame_db:\n"
                "  mixture  %.6f\n"
                "  nlms     %.6f\n"
                "  vanilla  %.6f\n"
                "  tec      %.6f\n",
                static_cast<unsigned long long>(opts.seed), n, ids.c_str(),
                result.mcd_mixture, result.mcd_nlms, result.mcd_vanilla, result.mcd_tec);
  result.report_text = buf;
  result.report_path = opts.out_dir / "demo_report.txt";
  std::ofstream out(result.report_path, std::ios::binary);
  require(out.good(), "demo: cannot write report");
  out << result.report_text;
  return result;
}

}  // namespace pipeline
