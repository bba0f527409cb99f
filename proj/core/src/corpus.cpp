#include "tec/corpus.hpp"

#include <cmath>
#include <cstdlib>
#include <unordered_map>

#include "tec/manifest.hpp"
#include "tec/phoneme.hpp"
#include "tec/rng.hpp"
#include "tec/wav.hpp"

namespace tec::corpus {

namespace {

// User queries: short, so toy training stays fast.
const std::vector<Utterance> kCleanTrain = {
    {"clean00", "what about tomorrow"},
    {"clean01", "turn on the light"},
    {"clean02", "play some music"},
    {"clean03", "stop the timer"},
    {"clean04", "call home now"},
    {"clean05", "next song"},
};
const std::vector<Utterance> kCleanTest = {
    {"cleantest00", "turn off the light"},
    {"cleantest01", "set a timer"},
};

// TTS responses: longer, including several utterances over three seconds.
const std::vector<Utterance> kPlaybackTrain = {
    {"play00", "today is sunny and warm with a light breeze from the west"},
    {"play01", "it will rain later this evening in your area"},
    {"play02", "there are two new messages waiting for you"},
    {"play03", "now playing morning jazz radio"},
};
const std::vector<Utterance> kPlaybackTest = {
    {"playtest00", "cloudy skies are expected this afternoon in your area"},
    {"playtest01", "the timer is set for ten minutes"},
};

enum class PhoneKind { kVowel, kNasal, kFricative, kStop, kGlide };

struct PhoneVoice {
  PhoneKind kind;
  double f1, f2;  // formant-like band centers, Hz
};

const std::unordered_map<std::string, PhoneVoice>& voice_table() {
  static const std::unordered_map<std::string, PhoneVoice> table = {
      {"AA", {PhoneKind::kVowel, 730, 1090}},  {"AE", {PhoneKind::kVowel, 660, 1720}},
      {"AH", {PhoneKind::kVowel, 640, 1190}},  {"AO", {PhoneKind::kVowel, 570, 840}},
      {"AW", {PhoneKind::kVowel, 700, 1220}},  {"AY", {PhoneKind::kVowel, 660, 1400}},
      {"EH", {PhoneKind::kVowel, 530, 1840}},  {"ER", {PhoneKind::kVowel, 490, 1350}},
      {"EY", {PhoneKind::kVowel, 480, 2000}},  {"IH", {PhoneKind::kVowel, 390, 1990}},
      {"IY", {PhoneKind::kVowel, 270, 2290}},  {"OW", {PhoneKind::kVowel, 450, 1000}},
      {"OY", {PhoneKind::kVowel, 500, 900}},   {"UH", {PhoneKind::kVowel, 440, 1020}},
      {"UW", {PhoneKind::kVowel, 300, 870}},
      {"M", {PhoneKind::kNasal, 280, 1100}},   {"N", {PhoneKind::kNasal, 320, 1400}},
      {"NG", {PhoneKind::kNasal, 300, 1200}},
      {"F", {PhoneKind::kFricative, 0, 4500}}, {"V", {PhoneKind::kFricative, 0, 3200}},
      {"S", {PhoneKind::kFricative, 0, 5500}}, {"Z", {PhoneKind::kFricative, 0, 4800}},
      {"SH", {PhoneKind::kFricative, 0, 3500}},{"ZH", {PhoneKind::kFricative, 0, 3000}},
      {"TH", {PhoneKind::kFricative, 0, 5000}},{"DH", {PhoneKind::kFricative, 0, 2800}},
      {"HH", {PhoneKind::kFricative, 0, 2000}},{"CH", {PhoneKind::kFricative, 0, 3800}},
      {"JH", {PhoneKind::kFricative, 0, 2600}},
      {"P", {PhoneKind::kStop, 0, 1500}},      {"B", {PhoneKind::kStop, 0, 900}},
      {"T", {PhoneKind::kStop, 0, 3500}},      {"D", {PhoneKind::kStop, 0, 2500}},
      {"K", {PhoneKind::kStop, 0, 2200}},      {"G", {PhoneKind::kStop, 0, 1500}},
      {"L", {PhoneKind::kGlide, 380, 1100}},   {"R", {PhoneKind::kGlide, 420, 1300}},
      {"W", {PhoneKind::kGlide, 330, 800}},    {"Y", {PhoneKind::kGlide, 290, 2100}},
  };
  return table;
}

PhoneVoice voice_for(const std::string& symbol) {
  auto it = voice_table().find(symbol);
  if (it != voice_table().end()) return it->second;
  // character-fallback tokens: spread band centers by the character value
  const double f = 400.0 + 60.0 * (symbol.back() - 'a');
  return {PhoneKind::kVowel, f, 2.0 * f + 300.0};
}

double phone_duration_s(PhoneKind kind) {
  switch (kind) {
    case PhoneKind::kVowel: return 0.20;
    case PhoneKind::kNasal: return 0.16;
    case PhoneKind::kFricative: return 0.16;
    case PhoneKind::kStop: return 0.12;
    case PhoneKind::kGlide: return 0.16;
  }
  return 0.16;
}

}  // namespace

const std::vector<Utterance>& clean_train() { return kCleanTrain; }
const std::vector<Utterance>& clean_test() { return kCleanTest; }
const std::vector<Utterance>& playback_train() { return kPlaybackTrain; }
const std::vector<Utterance>& playback_test() { return kPlaybackTest; }

dsp::Waveform synth_utterance(const std::string& text, std::uint64_t seed,
                              int sample_rate_hz) {
  const text::PhonemeSequence seq = text::phonemize(text);
  Rng rng(seed, "utterance:" + text);
  const double f0 = rng.uniform(110.0, 220.0);

  dsp::Waveform w;
  w.sample_rate_hz = sample_rate_hz;
  double pitch = f0;
  for (std::size_t p = 0; p < seq.symbols.size(); ++p) {
    const PhoneVoice voice = voice_for(seq.symbols[p]);
    const double dur = phone_duration_s(voice.kind) * rng.uniform(0.9, 1.1);
    const std::size_t n = std::size_t(dur * sample_rate_hz);
    const std::size_t fade = std::size_t(0.01 * sample_rate_hz);
    pitch *= rng.uniform(0.98, 1.02);  // slow pitch drift

    std::vector<double> seg(n, 0.0);
    if (voice.kind == PhoneKind::kFricative || voice.kind == PhoneKind::kStop) {
      // noise burst, crudely shaped by a one-pole filter toward voice.f2
      const double alpha = std::exp(-2.0 * M_PI * voice.f2 / sample_rate_hz);
      double state = 0.0;
      const std::size_t burst = voice.kind == PhoneKind::kStop ? n / 3 : n;
      for (std::size_t i = 0; i < burst; ++i) {
        const double noise = rng.uniform(-1.0, 1.0);
        state = alpha * state + (1.0 - alpha) * noise;
        seg[i] = 0.35 * (noise - state);  // keep the high band
      }
    } else {
      // harmonic stack with band emphasis near the two formants
      const int harmonics = 10;
      std::vector<double> amp(harmonics), phase(harmonics);
      for (int h = 0; h < harmonics; ++h) {
        const double fh = pitch * (h + 1);
        auto band = [&](double center, double width) {
          const double d = (fh - center) / width;
          return std::exp(-0.5 * d * d);
        };
        amp[h] = 0.15 + 0.8 * band(voice.f1, 220.0) + 0.5 * band(voice.f2, 320.0);
        phase[h] = rng.uniform(0.0, 2.0 * M_PI);
      }
      for (std::size_t i = 0; i < n; ++i) {
        const double t = double(i) / sample_rate_hz;
        double s = 0.0;
        for (int h = 0; h < harmonics; ++h) {
          const double fh = pitch * (h + 1);
          if (fh >= sample_rate_hz / 2.0) break;
          s += amp[h] * std::sin(2.0 * M_PI * fh * t + phase[h]);
        }
        seg[i] = 0.12 * s;
      }
    }
    for (std::size_t i = 0; i < fade && i < n; ++i) {
      const double g = 0.5 - 0.5 * std::cos(M_PI * i / fade);
      seg[i] *= g;
      seg[n - 1 - i] *= g;
    }
    w.samples.insert(w.samples.end(), seg.begin(), seg.end());

    // short pause at word boundaries, approximated every few phones
    if ((p + 1) % 4 == 0) w.samples.insert(w.samples.end(), std::size_t(0.04 * sample_rate_hz), 0.0);
  }
  dsp::normalize_peak(w, 0.6);
  return w;
}

std::filesystem::path corpus_dir(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv("TEC_DATA_DIR"); env && *env) return env;
  return fallback;
}

void ensure_corpus(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const fs::path marker = dir / "clean_train.jsonl";
  if (fs::exists(marker)) return;
  fs::create_directories(dir / "wav");

  auto emit = [&](const std::vector<Utterance>& utts, const std::string& manifest) {
    std::vector<synth::UtteranceEntry> entries;
    for (const auto& u : utts) {
      const std::string rel = "wav/" + u.id + ".wav";
      dsp::write_wav(dir / rel, synth_utterance(u.text, hash64(u.id)));
      entries.push_back({u.id, rel, u.text});
    }
    synth::write_utterance_manifest(dir / manifest, entries);
  };
  emit(kCleanTrain, "clean_train.jsonl");
  emit(kCleanTest, "clean_test.jsonl");
  emit(kPlaybackTrain, "playback_train.jsonl");
  emit(kPlaybackTest, "playback_test.jsonl");
}

}  // namespace tec::corpus
