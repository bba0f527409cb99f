// tec: command-line front end for the textual echo cancellation toolkit.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tec/corpus.hpp"
#include "tec/griffin_lim.hpp"
#include "tec/metrics.hpp"
#include "tec/parallel.hpp"
#include "tec/pipeline.hpp"
#include "tec/train.hpp"
#include "tec/wav.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "tec 0.1.0";

struct ResolvedConfig {
  tec::model::ModelConfig model;
  tec::model::TrainConfig train;
  tec::dsp::SpectralConfig spectral;
};

// Config files are JSON key-value documents:
//   {"preset": "toy", "model": {...}, "train": {...}, "spectral": {...}}
ResolvedConfig load_config(const std::string& path, const std::string& preset_flag) {
  ResolvedConfig out;
  std::string preset = preset_flag.empty() ? "toy" : preset_flag;

  nlohmann::json j;
  if (!path.empty()) {
    std::ifstream in(path);
    tec::require(in.good(), "config: cannot open " + path);
    try {
      in >> j;
    } catch (const std::exception& e) {
      tec::fail("config: " + path + ": " + e.what());
    }
    if (j.contains("preset")) preset = j["preset"].get<std::string>();
  }

  const int vocab = tec::text::vocab_size();
  if (preset == "toy") {
    out.model = tec::model::ModelConfig::toy(vocab);
    out.spectral = tec::pipeline::spectral_toy();
    out.train = tec::pipeline::toy_train_config(500, 0);
  } else if (preset == "micro") {
    out.model = tec::model::ModelConfig::micro(vocab);
    out.spectral = tec::pipeline::spectral_toy();
    out.train = tec::pipeline::toy_train_config(500, 0);
  } else if (preset == "table1") {
    out.model = tec::model::ModelConfig::table1(vocab);
    out.spectral = tec::pipeline::spectral_table1();
    out.train.steps = 500;
  } else {
    tec::fail("config: unknown preset \"" + preset + "\" (toy|micro|table1)");
  }

  if (j.contains("model")) {
    const auto& m = j["model"];
    auto get_int = [&](const char* key, int& field) {
      if (m.contains(key)) field = m[key].get<int>();
    };
    get_int("audio_conv_channels", out.model.audio_conv_channels);
    get_int("clstm_units", out.model.clstm_units);
    get_int("audio_bilstm_units", out.model.audio_bilstm_units);
    get_int("embedding_dim", out.model.embedding_dim);
    get_int("text_conv_channels", out.model.text_conv_channels);
    get_int("text_bilstm_units", out.model.text_bilstm_units);
    get_int("context_dim", out.model.context_dim);
    get_int("gmm_components", out.model.gmm_components);
    get_int("prenet_units", out.model.prenet_units);
    get_int("dec_lstm_units", out.model.dec_lstm_units);
    get_int("mel_dim", out.model.mel_dim);
    get_int("postnet_channels", out.model.postnet_channels);
    if (m.contains("clstm_substitute_bilstm"))
      out.model.clstm_substitute_bilstm = m["clstm_substitute_bilstm"].get<bool>();
    if (m.contains("stop_positive_weight"))
      out.model.stop_positive_weight = m["stop_positive_weight"].get<double>();
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    if (t.contains("batch_size")) out.train.batch_size = t["batch_size"].get<int>();
    if (t.contains("lr_initial")) out.train.lr.initial = t["lr_initial"].get<double>();
    if (t.contains("lr_final")) out.train.lr.final_lr = t["lr_final"].get<double>();
    if (t.contains("lr_decay_steps")) out.train.lr.decay_steps = t["lr_decay_steps"].get<long>();
  }
  if (j.contains("spectral")) {
    const auto& s = j["spectral"];
    if (s.contains("n_mels")) out.spectral.n_mels = s["n_mels"].get<int>();
    if (s.contains("frame_length_ms")) out.spectral.frame_length_ms = s["frame_length_ms"].get<double>();
    if (s.contains("frame_shift_ms")) out.spectral.frame_shift_ms = s["frame_shift_ms"].get<double>();
    if (s.contains("fmin_hz")) out.spectral.fmin_hz = s["fmin_hz"].get<double>();
    if (s.contains("fmax_hz")) out.spectral.fmax_hz = s["fmax_hz"].get<double>();
  }
  tec::require(out.model.mel_dim == out.spectral.n_mels,
               "config: model mel_dim must equal spectral n_mels");
  return out;
}

std::map<std::string, double> spectral_meta(const tec::dsp::SpectralConfig& cfg) {
  return {
      {"spec_frame_length_ms", cfg.frame_length_ms},
      {"spec_frame_shift_ms", cfg.frame_shift_ms},
      {"spec_fft_size", double(cfg.fft_size)},
      {"spec_n_mels", double(cfg.n_mels)},
      {"spec_n_mfcc", double(cfg.n_mfcc)},
      {"spec_fmin_hz", cfg.fmin_hz},
      {"spec_fmax_hz", cfg.fmax_hz},
      {"spec_log_floor", cfg.log_floor},
  };
}

tec::dsp::SpectralConfig spectral_from_meta(const std::map<std::string, double>& meta) {
  tec::dsp::SpectralConfig cfg;
  auto get = [&](const char* key, double def) {
    auto it = meta.find(key);
    return it == meta.end() ? def : it->second;
  };
  cfg.frame_length_ms = get("spec_frame_length_ms", cfg.frame_length_ms);
  cfg.frame_shift_ms = get("spec_frame_shift_ms", cfg.frame_shift_ms);
  cfg.fft_size = int(get("spec_fft_size", 0));
  cfg.n_mels = int(get("spec_n_mels", cfg.n_mels));
  cfg.n_mfcc = int(get("spec_n_mfcc", cfg.n_mfcc));
  cfg.fmin_hz = get("spec_fmin_hz", cfg.fmin_hz);
  cfg.fmax_hz = get("spec_fmax_hz", cfg.fmax_hz);
  cfg.log_floor = get("spec_log_floor", cfg.log_floor);
  return cfg;
}

// ---- subcommand bodies ------------------------------------------------------

struct MixArgs {
  std::string clean, playback, rooms, out;
  std::uint64_t seed = 0;
  double snr_db = 0.0;
  int threads = 1;
};

int cmd_mix(const MixArgs& a) {
  tec::synth::RoomsSpec rooms;
  if (!a.rooms.empty()) rooms = tec::synth::RoomsSpec::from_json_file(a.rooms);

  tec::synth::DatasetOptions opts;
  opts.seed = a.seed;
  opts.snr_db = a.snr_db;
  opts.threads = a.threads;
  const auto report = tec::synth::build_dataset(a.clean, a.playback, rooms, a.out, opts);

  tec::pipeline::write_run_meta(a.out, "mix",
                                {{"clean", a.clean},
                                 {"playback", a.playback},
                                 {"rooms", a.rooms},
                                 {"seed", std::to_string(a.seed)},
                                 {"snr_db", std::to_string(a.snr_db)},
                                 {"threads", std::to_string(a.threads)}});
  std::cout << "wrote " << report.records.size() << " records to "
            << report.manifest_path.string() << "\n";
  for (const auto& f : report.failures) std::cerr << "failed: " << f << "\n";
  if (report.records.empty()) {
    std::cerr << "error: every record failed\n";
    return 1;
  }
  return 0;
}

struct NlmsArgs {
  std::string mixture, playback, out;
  int taps = 1024;
  double mu = 0.5;
  double eps = 1e-6;
};

int cmd_nlms(const NlmsArgs& a) {
  tec::dsp::Waveform mixture = tec::dsp::read_wav(a.mixture);
  tec::dsp::Waveform playback = tec::dsp::read_wav(a.playback);
  if (playback.sample_rate_hz != mixture.sample_rate_hz)
    playback = tec::dsp::resample_linear(playback, mixture.sample_rate_hz);
  auto [mix_padded, play_padded] = tec::synth::pad_to_equal_length(mixture, playback);

  tec::aec::NlmsConfig cfg;
  cfg.filter_taps = a.taps;
  cfg.step_size_mu = a.mu;
  cfg.regularizer_eps = a.eps;
  const tec::dsp::Waveform enhanced = tec::aec::nlms_cancel(mix_padded, play_padded, cfg);
  tec::dsp::write_wav(a.out, enhanced);

  const fs::path out_dir = fs::path(a.out).has_parent_path() ? fs::path(a.out).parent_path()
                                                             : fs::path(".");
  tec::pipeline::write_run_meta(out_dir, "nlms",
                                {{"mixture", a.mixture},
                                 {"playback", a.playback},
                                 {"out", a.out},
                                 {"taps", std::to_string(a.taps)},
                                 {"mu", std::to_string(a.mu)}});
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

struct TrainArgs {
  std::string manifest, mode = "tec", config, ckpt_out;
  long steps = 500;
  std::uint64_t seed = 0;
  int threads = 1;
  long log_every = 50;
};

int cmd_train(const TrainArgs& a) {
  ResolvedConfig cfg = load_config(a.config, "");
  const tec::model::Mode mode = tec::model::mode_from_name(a.mode);
  cfg.model.mode = mode;
  cfg.train.steps = a.steps;
  cfg.train.seed = tec::split_seed(a.seed, "trainer");

  const auto records = tec::synth::read_mixture_manifest(a.manifest);
  const fs::path manifest_dir = fs::path(a.manifest).parent_path();
  std::vector<tec::model::TrainItem> items(records.size());
  tec::parallel_for(records.size(), a.threads, [&](std::size_t i) {
    items[i] = tec::pipeline::item_from_record(records[i], manifest_dir, cfg.spectral,
                                               mode == tec::model::Mode::kAecSeq2seq);
  });

  tec::model::TecModel net(cfg.model, tec::split_seed(a.seed, "model"));
  tec::model::Trainer trainer(net, cfg.train);
  trainer.run(items, [&](long step, const tec::model::LossBreakdown& loss) {
    if (a.log_every > 0 && (step % a.log_every == 0 || step + 1 == a.steps))
      std::printf("step %ld loss %.6f (l2 %.4f/%.4f l1 %.4f/%.4f ce %.4f)\n", step,
                  loss.total, loss.l2_pre, loss.l2_post, loss.l1_pre, loss.l1_post,
                  loss.stop_ce);
  });

  net.save(a.ckpt_out, spectral_meta(cfg.spectral));
  const fs::path out_dir = fs::path(a.ckpt_out).has_parent_path()
                               ? fs::path(a.ckpt_out).parent_path()
                               : fs::path(".");
  tec::pipeline::write_run_meta(out_dir, "train",
                                {{"manifest", a.manifest},
                                 {"mode", a.mode},
                                 {"config", a.config},
                                 {"steps", std::to_string(a.steps)},
                                 {"seed", std::to_string(a.seed)},
                                 {"ckpt", a.ckpt_out}});
  std::cout << "saved checkpoint " << a.ckpt_out << "\n";
  return 0;
}

struct EnhanceArgs {
  std::string ckpt, mixture, text, playback, out_mel, out_wav;
  int max_steps = 0;
};

int cmd_enhance(const EnhanceArgs& a) {
  auto restored = tec::model::TecModel::from_checkpoint(a.ckpt);
  tec::model::TecModel& net = *restored.model;
  const tec::dsp::SpectralConfig spectral = spectral_from_meta(restored.meta);

  const tec::dsp::Waveform mixture = tec::dsp::read_wav(a.mixture);
  const Matrix mel_in = tec::dsp::mel_spectrogram(mixture, spectral).values;

  tec::model::ModelInput input;
  input.mixture_mel = &mel_in;
  Matrix playback_mel;
  if (net.config().mode == tec::model::Mode::kTec) {
    tec::require(!a.text.empty(), "enhance: --text is required in tec mode");
    tec::text::PhonemeSequence seq;
    try {
      seq = tec::text::parse_phonemes(a.text);  // already phone symbols?
    } catch (const tec::Error&) {
      seq = tec::text::phonemize(a.text);  // plain transcript
    }
    input.text_ids = seq.ids;
  } else if (net.config().mode == tec::model::Mode::kAecSeq2seq) {
    tec::require(!a.playback.empty(), "enhance: --playback is required in aec mode");
    const tec::dsp::Waveform playback = tec::dsp::read_wav(a.playback);
    playback_mel = tec::dsp::mel_spectrogram(playback, spectral).values;
    input.playback_mel = &playback_mel;
  }

  tec::model::TecModel::InferOptions opts;
  opts.max_steps = a.max_steps;
  const tec::model::TecModel::InferResult result = net.infer(input, opts);

  tec::dsp::MelSpectrogram out_mel;
  out_mel.values = result.mel;
  out_mel.config = spectral;
  out_mel.sample_rate_hz = mixture.sample_rate_hz;
  tec::dsp::save_mel(a.out_mel, out_mel);
  if (!a.out_wav.empty())
    tec::dsp::write_wav(a.out_wav, tec::dsp::griffin_lim(out_mel));

  const fs::path out_dir = fs::path(a.out_mel).has_parent_path()
                               ? fs::path(a.out_mel).parent_path()
                               : fs::path(".");
  tec::pipeline::write_run_meta(out_dir, "enhance",
                                {{"ckpt", a.ckpt},
                                 {"mixture", a.mixture},
                                 {"text", a.text},
                                 {"out_mel", a.out_mel},
                                 {"out_wav", a.out_wav},
                                 {"truncated", result.truncated ? "true" : "false"}});
  std::cout << "wrote " << a.out_mel << " (" << result.steps << " frames"
            << (result.truncated ? ", truncated" : "") << ")\n";
  return 0;
}

struct EvalArgs {
  std::string manifest, enhanced_dir, hyp, report;
  int threads = 1;
};

int cmd_eval(const EvalArgs& a) {
  const auto records = tec::synth::read_mixture_manifest(a.manifest);
  const fs::path manifest_dir = fs::path(a.manifest).parent_path();
  const fs::path enhanced_dir = a.enhanced_dir;

  // optional hypothesis transcripts, classic "<words> (<id>)" lines
  std::map<std::string, std::string> hyps;
  if (!a.hyp.empty()) {
    std::ifstream in(a.hyp);
    tec::require(in.good(), "eval: cannot open " + a.hyp);
    std::string line;
    while (std::getline(in, line)) {
      const auto open = line.rfind('(');
      const auto close = line.rfind(')');
      if (open == std::string::npos || close == std::string::npos || close < open) continue;
      const std::string id = line.substr(open + 1, close - open - 1);
      hyps[id] = line.substr(0, open);
    }
  }

  struct Row {
    std::string id;
    tec::metrics::McdReport mcd;
    double wer = -1.0;
    std::string error;
  };
  std::vector<Row> rows(records.size());

  tec::parallel_for(records.size(), a.threads, [&](std::size_t i) {
    const auto& rec = records[i];
    Row& row = rows[i];
    row.id = rec.id;
    try {
      const tec::dsp::Waveform clean = tec::dsp::read_wav(manifest_dir / rec.clean_path);
      const fs::path mel_path = enhanced_dir / (rec.id + ".mel");
      const fs::path wav_path = enhanced_dir / (rec.id + ".wav");
      if (fs::exists(mel_path)) {
        const tec::dsp::MelSpectrogram enhanced = tec::dsp::load_mel(mel_path);
        row.mcd = tec::metrics::mcd(enhanced,
                                    tec::dsp::mel_spectrogram(clean, enhanced.config));
      } else if (fs::exists(wav_path)) {
        const tec::dsp::Waveform enhanced = tec::dsp::read_wav(wav_path);
        row.mcd = tec::metrics::mcd(enhanced, clean, tec::pipeline::spectral_table1());
      } else {
        tec::fail("no enhanced output (" + mel_path.string() + " or .wav)");
      }
      auto hyp_it = hyps.find(rec.id);
      if (hyp_it != hyps.end() && !rec.clean_text.empty()) {
        row.wer = tec::metrics::wer(tec::metrics::tokenize_words(rec.clean_text),
                                    tec::metrics::tokenize_words(hyp_it->second));
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });

  ordered_json report;
  ordered_json record_rows = ordered_json::array();
  double mcd_sum = 0.0, wer_sum = 0.0;
  std::size_t mcd_count = 0, wer_count = 0, failures = 0;
  for (const auto& row : rows) {
    ordered_json r;
    r["id"] = row.id;
    if (!row.error.empty()) {
      r["error"] = row.error;
      ++failures;
    } else {
      r["mcd_total_db"] = row.mcd.total_db;
      r["mcd_per_frame_db"] = row.mcd.per_frame_db;
      r["aligned_frames"] = row.mcd.aligned_frames;
      mcd_sum += row.mcd.per_frame_db;
      ++mcd_count;
      if (row.wer >= 0.0) {
        r["wer"] = row.wer;
        wer_sum += row.wer;
        ++wer_count;
      }
    }
    record_rows.push_back(std::move(r));
  }
  report["records"] = std::move(record_rows);
  ordered_json agg;
  agg["records_scored"] = mcd_count;
  agg["records_failed"] = failures;
  if (mcd_count > 0) agg["mcd_per_frame_db_mean"] = mcd_sum / double(mcd_count);
  if (wer_count > 0) agg["wer_mean"] = wer_sum / double(wer_count);
  report["aggregate"] = std::move(agg);

  if (fs::path(a.report).has_parent_path())
    fs::create_directories(fs::path(a.report).parent_path());
  std::ofstream out(a.report, std::ios::binary);
  tec::require(out.good(), "eval: cannot write " + a.report);
  out << report.dump(2) << "\n";
  std::cout << "wrote " << a.report << "\n";
  return failures == records.size() ? 1 : 0;
}

struct FlopsArgs {
  std::string mode = "tec", preset = "table1", config;
  long tx = 0, ty = 0, tz = 0;
  std::string report;
};

int cmd_flops(const FlopsArgs& a) {
  ResolvedConfig cfg = load_config(a.config, a.preset);
  cfg.model.mode = tec::model::mode_from_name(a.mode);
  const tec::metrics::FlopsReport report =
      tec::metrics::flops_estimate(cfg.model, a.tx, a.ty, a.tz);

  ordered_json j;
  j["mode"] = a.mode;
  j["m_audio"] = report.m_audio;
  j["m_text"] = report.m_text;
  j["m_dec"] = report.m_dec;
  j["t_x"] = report.t_x;
  j["t_y"] = report.t_y;
  j["t_z"] = report.t_z;
  j["flops_atten"] = report.flops_atten;
  j["total"] = report.total;
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!a.report.empty()) {
    std::ofstream out(a.report, std::ios::binary);
    tec::require(out.good(), "flops: cannot write " + a.report);
    out << text;
  }
  return 0;
}

struct DemoArgs {
  std::uint64_t seed = 7;
  std::string out = "demo_out";
  int threads = 1;
  long steps = 200;
};

int cmd_demo(const DemoArgs& a) {
  tec::pipeline::DemoOptions opts;
  opts.seed = a.seed;
  opts.threads = a.threads;
  opts.train_steps = a.steps;
  opts.out_dir = a.out;
  const tec::pipeline::DemoResult result = tec::pipeline::run_demo(opts);
  tec::pipeline::write_run_meta(a.out, "demo",
                                {{"seed", std::to_string(a.seed)},
                                 {"threads", std::to_string(a.threads)},
                                 {"steps", std::to_string(a.steps)}});
  std::cout << result.report_text;
  std::cout << "report: " << result.report_path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"textual echo cancellation toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  MixArgs mix;
  auto* mix_cmd = app.add_subcommand("mix", "synthesize echoic mixtures from two manifests");
  mix_cmd->add_option("--clean", mix.clean, "clean (user speech) manifest")->required();
  mix_cmd->add_option("--playback", mix.playback, "TTS playback manifest")->required();
  mix_cmd->add_option("--rooms", mix.rooms, "rooms distribution json");
  mix_cmd->add_option("--seed", mix.seed, "random seed");
  mix_cmd->add_option("--snr", mix.snr_db, "mixing SNR in dB (default 0)");
  mix_cmd->add_option("--threads", mix.threads, "worker threads");
  mix_cmd->add_option("--out", mix.out, "output directory")->required();

  NlmsArgs nlms;
  auto* nlms_cmd = app.add_subcommand("nlms", "NLMS echo cancellation baseline");
  nlms_cmd->add_option("--mixture", nlms.mixture, "mixture wav")->required();
  nlms_cmd->add_option("--playback", nlms.playback, "playback reference wav")->required();
  nlms_cmd->add_option("--out", nlms.out, "enhanced wav")->required();
  nlms_cmd->add_option("--taps", nlms.taps, "filter taps (default 1024)");
  nlms_cmd->add_option("--mu", nlms.mu, "step size in (0,2) (default 0.5)");
  nlms_cmd->add_option("--eps", nlms.eps, "regularizer (default 1e-6)");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train a model on a mixture manifest");
  train_cmd->add_option("--manifest", train.manifest, "mixture manifest")->required();
  train_cmd->add_option("--mode", train.mode, "tec|vanilla|aec");
  train_cmd->add_option("--config", train.config, "config json");
  train_cmd->add_option("--steps", train.steps, "training steps");
  train_cmd->add_option("--seed", train.seed, "random seed");
  train_cmd->add_option("--threads", train.threads, "feature-extraction threads");
  train_cmd->add_option("--log-every", train.log_every, "progress print period");
  train_cmd->add_option("--ckpt-out", train.ckpt_out, "checkpoint path")->required();

  EnhanceArgs enh;
  auto* enh_cmd = app.add_subcommand("enhance", "run inference on one mixture");
  enh_cmd->add_option("--ckpt", enh.ckpt, "checkpoint path")->required();
  enh_cmd->add_option("--mixture", enh.mixture, "mixture wav")->required();
  enh_cmd->add_option("--text", enh.text, "playback transcript or phoneme string");
  enh_cmd->add_option("--playback", enh.playback, "playback wav (aec mode)");
  enh_cmd->add_option("--out-mel", enh.out_mel, "output mel file")->required();
  enh_cmd->add_option("--out-wav", enh.out_wav, "optional Griffin-Lim wav");
  enh_cmd->add_option("--max-steps", enh.max_steps, "decoder step cap (0 = auto)");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "score enhanced outputs against a manifest");
  eval_cmd->add_option("--manifest", eval.manifest, "mixture manifest")->required();
  eval_cmd->add_option("--enhanced-dir", eval.enhanced_dir, "directory of <id>.mel/.wav")
      ->required();
  eval_cmd->add_option("--hyp", eval.hyp, "hypothesis trn file for WER");
  eval_cmd->add_option("--threads", eval.threads, "worker threads");
  eval_cmd->add_option("--report", eval.report, "report json path")->required();

  FlopsArgs flops;
  auto* flops_cmd = app.add_subcommand("flops", "parameter-count cost model");
  flops_cmd->add_option("--mode", flops.mode, "tec|vanilla|aec");
  flops_cmd->add_option("--preset", flops.preset, "toy|micro|table1");
  flops_cmd->add_option("--config", flops.config, "config json");
  flops_cmd->add_option("--tx", flops.tx, "mixture frames")->required();
  flops_cmd->add_option("--ty", flops.ty, "text length")->required();
  flops_cmd->add_option("--tz", flops.tz, "target frames")->required();
  flops_cmd->add_option("--report", flops.report, "optional report path");

  DemoArgs demo;
  auto* demo_cmd = app.add_subcommand("demo", "end-to-end interrupted-query demo");
  demo_cmd->add_option("--seed", demo.seed, "random seed");
  demo_cmd->add_option("--out", demo.out, "output directory");
  demo_cmd->add_option("--threads", demo.threads, "worker threads");
  demo_cmd->add_option("--steps", demo.steps, "training steps per model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << "error: " << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (mix_cmd->parsed()) return cmd_mix(mix);
    if (nlms_cmd->parsed()) return cmd_nlms(nlms);
    if (train_cmd->parsed()) return cmd_train(train);
    if (enh_cmd->parsed()) return cmd_enhance(enh);
    if (eval_cmd->parsed()) return cmd_eval(eval);
    if (flops_cmd->parsed()) return cmd_flops(flops);
    if (demo_cmd->parsed()) return cmd_demo(demo);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
