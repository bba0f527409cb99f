#include "tec/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "tec/common.hpp"

namespace tec::synth {

using nlohmann::ordered_json;

namespace {

std::vector<ordered_json> read_jsonl(const std::filesystem::path& file) {
  std::ifstream in(file);
  require(in.good(), "manifest: cannot open " + file.string());
  std::vector<ordered_json> lines;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      lines.push_back(ordered_json::parse(line));
    } catch (const std::exception& e) {
      fail("manifest: " + file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return lines;
}

void write_jsonl(const std::filesystem::path& file, const std::vector<ordered_json>& lines) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  require(out.good(), "manifest: cannot open " + file.string() + " for writing");
  for (const auto& j : lines) out << j.dump() << "\n";
  require(out.good(), "manifest: write failed for " + file.string());
}

}  // namespace

std::vector<UtteranceEntry> read_utterance_manifest(const std::filesystem::path& file) {
  std::vector<UtteranceEntry> entries;
  for (const auto& j : read_jsonl(file)) {
    UtteranceEntry e;
    e.id = j.at("id").get<std::string>();
    e.path = j.at("path").get<std::string>();
    e.text = j.value("text", "");
    entries.push_back(std::move(e));
  }
  require(!entries.empty(), "manifest: " + file.string() + " is empty");
  return entries;
}

void write_utterance_manifest(const std::filesystem::path& file,
                              const std::vector<UtteranceEntry>& entries) {
  std::vector<ordered_json> lines;
  for (const auto& e : entries) {
    ordered_json j;
    j["id"] = e.id;
    j["path"] = e.path;
    j["text"] = e.text;
    lines.push_back(std::move(j));
  }
  write_jsonl(file, lines);
}

std::vector<MixtureRecord> read_mixture_manifest(const std::filesystem::path& file) {
  std::vector<MixtureRecord> records;
  for (const auto& j : read_jsonl(file)) {
    MixtureRecord r;
    r.id = j.at("id").get<std::string>();
    r.mixture_path = j.at("mixture_path").get<std::string>();
    r.clean_path = j.at("clean_path").get<std::string>();
    r.playback_path = j.at("playback_path").get<std::string>();
    r.text = j.at("text").get<std::string>();
    r.phonemes = j.at("phonemes").get<std::string>();
    r.snr_db = j.at("snr_db").get<double>();
    r.rir_id = j.at("rir_id").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.echo_gain = j.value("echo_gain", 1.0);
    r.peak_scale = j.value("peak_scale", 1.0);
    r.clean_text = j.value("clean_text", "");
    records.push_back(std::move(r));
  }
  require(!records.empty(), "manifest: " + file.string() + " is empty");
  return records;
}

void write_mixture_manifest(const std::filesystem::path& file,
                            const std::vector<MixtureRecord>& records) {
  std::vector<ordered_json> lines;
  for (const auto& r : records) {
    ordered_json j;
    j["id"] = r.id;
    j["mixture_path"] = r.mixture_path;
    j["clean_path"] = r.clean_path;
    j["playback_path"] = r.playback_path;
    j["text"] = r.text;
    j["phonemes"] = r.phonemes;
    j["snr_db"] = r.snr_db;
    j["rir_id"] = r.rir_id;
    j["seed"] = r.seed;
    j["echo_gain"] = r.echo_gain;
    j["peak_scale"] = r.peak_scale;
    j["clean_text"] = r.clean_text;
    lines.push_back(std::move(j));
  }
  write_jsonl(file, lines);
}

}  // namespace tec::synth
