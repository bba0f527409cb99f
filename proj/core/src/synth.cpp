#include "tec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "tec/container.hpp"
#include "tec/parallel.hpp"
#include "tec/phoneme.hpp"
#include "tec/wav.hpp"

namespace tec::synth {

void RoomConfig::validate() const {
  for (double d : dimensions_m)
    require(d > 0.0, "room: dimensions must be positive");
  for (int a = 0; a < 3; ++a) {
    require(source_pos_m[a] > 0.0 && source_pos_m[a] < dimensions_m[a],
            "room: source position must be strictly inside the room");
    require(mic_pos_m[a] > 0.0 && mic_pos_m[a] < dimensions_m[a],
            "room: mic position must be strictly inside the room");
  }
  require(absorption > 0.0 && absorption <= 1.0, "room: absorption must be in (0, 1]");
  require(max_order >= 0, "room: max_order must be >= 0");
  require(speed_of_sound_mps > 0.0, "room: speed of sound must be positive");
}

Rir generate_rir(const RoomConfig& cfg, std::uint64_t /*seed*/, int sample_rate_hz) {
  cfg.validate();
  require(sample_rate_hz > 0, "generate_rir: sample rate must be positive");

  // Along each axis the image coordinates are 2mL + (-1)^q s; the image in
  // lattice cell (2m - q) crosses |2m - q| wall planes.
  const int order = cfg.max_order;
  const double reflect = 1.0 - cfg.absorption;

  struct Tap {
    std::size_t delay;
    double amp;
  };
  std::vector<Tap> taps;
  const int m_max = order / 2 + 1;
  for (int mx = -m_max; mx <= m_max; ++mx)
    for (int qx = 0; qx <= 1; ++qx) {
      const int rx = std::abs(2 * mx - qx);
      if (rx > order) continue;
      for (int my = -m_max; my <= m_max; ++my)
        for (int qy = 0; qy <= 1; ++qy) {
          const int ry = std::abs(2 * my - qy);
          if (rx + ry > order) continue;
          for (int mz = -m_max; mz <= m_max; ++mz)
            for (int qz = 0; qz <= 1; ++qz) {
              const int rz = std::abs(2 * mz - qz);
              const int refl = rx + ry + rz;
              if (refl > order) continue;
              const double ix = 2.0 * mx * cfg.dimensions_m[0] +
                                (qx ? -cfg.source_pos_m[0] : cfg.source_pos_m[0]);
              const double iy = 2.0 * my * cfg.dimensions_m[1] +
                                (qy ? -cfg.source_pos_m[1] : cfg.source_pos_m[1]);
              const double iz = 2.0 * mz * cfg.dimensions_m[2] +
                                (qz ? -cfg.source_pos_m[2] : cfg.source_pos_m[2]);
              const double dx = ix - cfg.mic_pos_m[0];
              const double dy = iy - cfg.mic_pos_m[1];
              const double dz = iz - cfg.mic_pos_m[2];
              const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
              require(dist > 0.0, "generate_rir: source and mic coincide");
              const double amp = std::pow(reflect, refl) / dist;
              if (amp == 0.0) continue;
              const std::size_t delay =
                  std::size_t(std::lround(dist / cfg.speed_of_sound_mps * sample_rate_hz));
              taps.push_back({delay, amp});
            }
        }
    }

  std::size_t max_delay = 0;
  for (const auto& t : taps) max_delay = std::max(max_delay, t.delay);
  Rir h;
  h.sample_rate_hz = sample_rate_hz;
  h.taps.assign(max_delay + 1, 0.0);
  for (const auto& t : taps) h.taps[t.delay] += t.amp;
  return h;
}

dsp::Waveform apply_echo_path(const dsp::Waveform& y, const Rir& h) {
  require(y.sample_rate_hz == h.sample_rate_hz,
          "apply_echo_path: sample-rate mismatch (" + std::to_string(y.sample_rate_hz) +
              " vs " + std::to_string(h.sample_rate_hz) + ")");
  dsp::Waveform out;
  out.sample_rate_hz = y.sample_rate_hz;
  out.samples = dsp::convolve(y.samples, h.taps);
  return out;
}

std::pair<dsp::Waveform, dsp::Waveform> pad_to_equal_length(const dsp::Waveform& a,
                                                            const dsp::Waveform& b) {
  require(a.sample_rate_hz == b.sample_rate_hz, "pad_to_equal_length: sample-rate mismatch");
  dsp::Waveform pa = a, pb = b;
  const std::size_t n = std::max(a.samples.size(), b.samples.size());
  pa.samples.resize(n, 0.0);
  pb.samples.resize(n, 0.0);
  return {std::move(pa), std::move(pb)};
}

MixResult mix_at_snr(const dsp::Waveform& clean, const dsp::Waveform& echo, double snr_db) {
  const double e_clean = dsp::energy(clean);
  const double e_echo = dsp::energy(echo);
  require(e_clean > 0.0, "mix_at_snr: clean signal has zero energy");
  require(e_echo > 0.0, "mix_at_snr: echo signal has zero energy");

  // 10*log10(E_clean / (g^2 * E_echo)) = snr_db
  const double g = std::sqrt(e_clean / (e_echo * std::pow(10.0, snr_db / 10.0)));

  auto [z, e] = pad_to_equal_length(clean, echo);
  MixResult res;
  res.echo_scale = g;
  res.mixture.sample_rate_hz = clean.sample_rate_hz;
  res.mixture.samples.resize(z.samples.size());
  for (std::size_t i = 0; i < z.samples.size(); ++i)
    res.mixture.samples[i] = z.samples[i] + g * e.samples[i];
  res.peak_scale = dsp::normalize_peak(res.mixture, 1.0);
  return res;
}

RoomsSpec RoomsSpec::from_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  require(in.good(), "rooms: cannot open " + file.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail("rooms: " + file.string() + ": " + e.what());
  }
  RoomsSpec spec;
  spec.count = j.value("count", spec.count);
  auto range = [&](const char* key, std::array<double, 2> def) {
    if (!j.contains(key)) return def;
    auto a = j.at(key);
    require(a.is_array() && a.size() == 2, std::string("rooms: ") + key + " must be [lo, hi]");
    return std::array<double, 2>{a[0].get<double>(), a[1].get<double>()};
  };
  spec.length_m = range("length_m", spec.length_m);
  spec.width_m = range("width_m", spec.width_m);
  spec.height_m = range("height_m", spec.height_m);
  spec.absorption = range("absorption", spec.absorption);
  spec.max_order = j.value("max_order", spec.max_order);
  require(spec.count > 0, "rooms: count must be positive");
  return spec;
}

void RoomsSpec::to_json_file(const std::filesystem::path& file) const {
  nlohmann::ordered_json j;
  j["count"] = count;
  j["length_m"] = length_m;
  j["width_m"] = width_m;
  j["height_m"] = height_m;
  j["absorption"] = absorption;
  j["max_order"] = max_order;
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  require(out.good(), "rooms: cannot open " + file.string() + " for writing");
  out << j.dump(2) << "\n";
}

std::vector<RoomConfig> sample_rooms(const RoomsSpec& spec, Rng& rng) {
  std::vector<RoomConfig> rooms;
  rooms.reserve(spec.count);
  for (int i = 0; i < spec.count; ++i) {
    RoomConfig r;
    r.dimensions_m = {rng.uniform(spec.length_m[0], spec.length_m[1]),
                      rng.uniform(spec.width_m[0], spec.width_m[1]),
                      rng.uniform(spec.height_m[0], spec.height_m[1])};
    // keep both endpoints away from the walls
    for (int a = 0; a < 3; ++a) {
      const double margin = 0.2 * r.dimensions_m[a];
      r.source_pos_m[a] = rng.uniform(margin, r.dimensions_m[a] - margin);
      r.mic_pos_m[a] = rng.uniform(margin, r.dimensions_m[a] - margin);
    }
    r.absorption = rng.uniform(spec.absorption[0], spec.absorption[1]);
    r.max_order = spec.max_order;
    rooms.push_back(r);
  }
  return rooms;
}

SynthesizedRecord make_mixture(const dsp::Waveform& clean, const dsp::Waveform& playback,
                               const Rir& rir, double snr_db) {
  SynthesizedRecord out;
  const dsp::Waveform echo = apply_echo_path(playback, rir);
  MixResult mix = mix_at_snr(clean, echo, snr_db);
  auto [clean_padded, echo_padded] = pad_to_equal_length(clean, echo);
  out.mixture = std::move(mix.mixture);
  out.clean_padded = std::move(clean_padded);
  out.echo = std::move(echo_padded);
  out.echo_gain = mix.echo_scale;
  out.peak_scale = mix.peak_scale;
  out.record.snr_db = snr_db;
  out.record.echo_gain = out.echo_gain;
  out.record.peak_scale = out.peak_scale;
  return out;
}

namespace {

dsp::Waveform load_utterance(const std::filesystem::path& manifest_dir,
                             const std::string& rel_path, int sample_rate_hz) {
  dsp::Waveform w = dsp::read_wav(manifest_dir / rel_path);
  if (w.sample_rate_hz != sample_rate_hz) w = dsp::resample_linear(w, sample_rate_hz);
  return w;
}

}  // namespace

BuildReport build_dataset(const std::filesystem::path& clean_manifest,
                          const std::filesystem::path& playback_manifest,
                          const RoomsSpec& rooms, const std::filesystem::path& out_dir,
                          const DatasetOptions& opts) {
  const auto clean_entries = read_utterance_manifest(clean_manifest);
  const auto playback_entries = read_utterance_manifest(playback_manifest);

  std::filesystem::create_directories(out_dir / "wav");
  std::filesystem::create_directories(out_dir / "rir");

  Rng room_rng(opts.seed, "rooms");
  const auto room_cfgs = sample_rooms(rooms, room_rng);
  std::vector<Rir> rirs(room_cfgs.size());
  for (std::size_t i = 0; i < room_cfgs.size(); ++i) {
    rirs[i] = generate_rir(room_cfgs[i], opts.seed, opts.sample_rate_hz);
    io::ArrayRecord rec;
    rec.name = "taps";
    rec.dims = {rirs[i].taps.size()};
    rec.data = rirs[i].taps;
    io::ArrayRecord rate;
    rate.name = "sample_rate_hz";
    rate.dims = {1};
    rate.data = {double(opts.sample_rate_hz)};
    io::write_container(out_dir / "rir" / ("room" + std::to_string(i) + ".rir"), "RIR1",
                        {rec, rate});
  }

  // Assignments are drawn serially so thread count never changes the dataset.
  struct Assignment {
    std::size_t playback_idx;
    std::size_t rir_idx;
    std::uint64_t record_seed;
  };
  Rng pick_rng(opts.seed, "assignments");
  std::vector<Assignment> plan(clean_entries.size());
  for (auto& a : plan) {
    a.playback_idx = pick_rng.index(playback_entries.size());
    a.rir_idx = pick_rng.index(rirs.size());
    a.record_seed = pick_rng.next_u64();
  }

  const auto clean_dir = clean_manifest.parent_path();
  const auto playback_dir = playback_manifest.parent_path();

  std::vector<MixtureRecord> records(clean_entries.size());
  std::vector<std::string> failures(clean_entries.size());
  std::vector<bool> ok(clean_entries.size(), false);

  parallel_for(clean_entries.size(), opts.threads, [&](std::size_t i) {
    const auto& clean_entry = clean_entries[i];
    const auto& play_entry = playback_entries[plan[i].playback_idx];
    const std::string id = "mix_" + clean_entry.id;
    try {
      require(!play_entry.text.empty(),
              "playback utterance \"" + play_entry.id + "\" has no transcript");
      const dsp::Waveform clean = load_utterance(clean_dir, clean_entry.path, opts.sample_rate_hz);
      const dsp::Waveform playback =
          load_utterance(playback_dir, play_entry.path, opts.sample_rate_hz);

      SynthesizedRecord synth =
          make_mixture(clean, playback, rirs[plan[i].rir_idx], opts.snr_db);

      auto [clean_padded, playback_padded] = pad_to_equal_length(clean, playback);
      (void)playback_padded;

      MixtureRecord& rec = synth.record;
      rec.id = id;
      rec.mixture_path = "wav/" + id + ".mix.wav";
      rec.clean_path = "wav/" + id + ".clean.wav";
      rec.playback_path = "wav/" + id + ".play.wav";
      rec.text = play_entry.text;
      rec.phonemes = text::serialize(text::phonemize(play_entry.text));
      rec.rir_id = "room" + std::to_string(plan[i].rir_idx);
      rec.seed = plan[i].record_seed;
      rec.clean_text = clean_entry.text;

      dsp::write_wav(out_dir / rec.mixture_path, synth.mixture);
      dsp::write_wav(out_dir / rec.clean_path, clean_padded);
      dsp::write_wav(out_dir / rec.playback_path, playback);
      records[i] = std::move(rec);
      ok[i] = true;
    } catch (const std::exception& e) {
      failures[i] = id + ": " + e.what();
    }
  });

  BuildReport report;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (ok[i])
      report.records.push_back(std::move(records[i]));
    else
      report.failures.push_back(failures[i]);
  }
  std::sort(report.records.begin(), report.records.end(),
            [](const MixtureRecord& a, const MixtureRecord& b) { return a.id < b.id; });

  report.manifest_path = out_dir / "mixtures.jsonl";
  write_mixture_manifest(report.manifest_path, report.records);
  return report;
}

}  // namespace tec::synth
