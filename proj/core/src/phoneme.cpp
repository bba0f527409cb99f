#include "tec/phoneme.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_map>

namespace tec::text {

namespace {

const char* kArpabet[] = {
    "AA", "AE", "AH", "AO", "AW", "AY", "B",  "CH", "D",  "DH", "EH", "ER", "EY",
    "F",  "G",  "HH", "IH", "IY", "JH", "K",  "L",  "M",  "N",  "NG", "OW", "OY",
    "P",  "R",  "S",  "SH", "T",  "TH", "UH", "UW", "V",  "W",  "Y",  "Z",  "ZH"};

std::vector<std::string> build_inventory() {
  std::vector<std::string> inv(std::begin(kArpabet), std::end(kArpabet));
  for (char c = 'a'; c <= 'z'; ++c) inv.push_back(std::string("@") + c);
  return inv;
}

// Small bundled lexicon covering the built-in corpus vocabulary.
const std::unordered_map<std::string, std::vector<std::string>>& lexicon() {
  static const std::unordered_map<std::string, std::vector<std::string>> lex = {
      {"what", {"W", "AH", "T"}},
      {"whats", {"W", "AH", "T", "S"}},
      {"about", {"AH", "B", "AW", "T"}},
      {"tomorrow", {"T", "AH", "M", "AA", "R", "OW"}},
      {"today", {"T", "AH", "D", "EY"}},
      {"the", {"DH", "AH"}},
      {"weather", {"W", "EH", "DH", "ER"}},
      {"is", {"IH", "Z"}},
      {"sunny", {"S", "AH", "N", "IY"}},
      {"and", {"AE", "N", "D"}},
      {"warm", {"W", "AO", "R", "M"}},
      {"with", {"W", "IH", "DH"}},
      {"a", {"AH"}},
      {"light", {"L", "AY", "T"}},
      {"lights", {"L", "AY", "T", "S"}},
      {"breeze", {"B", "R", "IY", "Z"}},
      {"from", {"F", "R", "AH", "M"}},
      {"west", {"W", "EH", "S", "T"}},
      {"turn", {"T", "ER", "N"}},
      {"on", {"AA", "N"}},
      {"off", {"AO", "F"}},
      {"kitchen", {"K", "IH", "CH", "AH", "N"}},
      {"play", {"P", "L", "EY"}},
      {"some", {"S", "AH", "M"}},
      {"music", {"M", "Y", "UW", "Z", "IH", "K"}},
      {"stop", {"S", "T", "AA", "P"}},
      {"timer", {"T", "AY", "M", "ER"}},
      {"set", {"S", "EH", "T"}},
      {"for", {"F", "ER"}},
      {"ten", {"T", "EH", "N"}},
      {"minutes", {"M", "IH", "N", "AH", "T", "S"}},
      {"it", {"IH", "T"}},
      {"will", {"W", "IH", "L"}},
      {"rain", {"R", "EY", "N"}},
      {"later", {"L", "EY", "T", "ER"}},
      {"this", {"DH", "IH", "S"}},
      {"evening", {"IY", "V", "N", "IH", "NG"}},
      {"in", {"IH", "N"}},
      {"your", {"Y", "AO", "R"}},
      {"area", {"EH", "R", "IY", "AH"}},
      {"there", {"DH", "EH", "R"}},
      {"are", {"AA", "R"}},
      {"two", {"T", "UW"}},
      {"new", {"N", "UW"}},
      {"messages", {"M", "EH", "S", "AH", "JH", "IH", "Z"}},
      {"waiting", {"W", "EY", "T", "IH", "NG"}},
      {"you", {"Y", "UW"}},
      {"now", {"N", "AW"}},
      {"playing", {"P", "L", "EY", "IH", "NG"}},
      {"morning", {"M", "AO", "R", "N", "IH", "NG"}},
      {"jazz", {"JH", "AE", "Z"}},
      {"radio", {"R", "EY", "D", "IY", "OW"}},
      {"volume", {"V", "AA", "L", "Y", "UW", "M"}},
      {"up", {"AH", "P"}},
      {"down", {"D", "AW", "N"}},
      {"next", {"N", "EH", "K", "S", "T"}},
      {"song", {"S", "AO", "NG"}},
      {"alarm", {"AH", "L", "AA", "R", "M"}},
      {"seven", {"S", "EH", "V", "AH", "N"}},
      {"degrees", {"D", "IH", "G", "R", "IY", "Z"}},
      {"outside", {"AW", "T", "S", "AY", "D"}},
      {"right", {"R", "AY", "T"}},
      {"cloudy", {"K", "L", "AW", "D", "IY"}},
      {"skies", {"S", "K", "AY", "Z"}},
      {"expected", {"IH", "K", "S", "P", "EH", "K", "T", "AH", "D"}},
      {"afternoon", {"AE", "F", "T", "ER", "N", "UW", "N"}},
      {"remind", {"R", "IY", "M", "AY", "N", "D"}},
      {"me", {"M", "IY"}},
      {"call", {"K", "AO", "L"}},
      {"home", {"HH", "OW", "M"}},
  };
  return lex;
}

std::string clean_word(const std::string& raw) {
  std::string out;
  for (char c : raw) {
    if (std::isalpha(static_cast<unsigned char>(c)))
      out += char(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

const std::vector<std::string>& phone_inventory() {
  static const std::vector<std::string> inv = build_inventory();
  return inv;
}

int phone_id(const std::string& symbol) {
  static const std::unordered_map<std::string, int> index = [] {
    std::unordered_map<std::string, int> m;
    const auto& inv = phone_inventory();
    for (std::size_t i = 0; i < inv.size(); ++i) m[inv[i]] = int(i);
    return m;
  }();
  auto it = index.find(symbol);
  return it == index.end() ? -1 : it->second;
}

int vocab_size() { return int(phone_inventory().size()); }

PhonemeSequence phonemize(const std::string& transcript) {
  PhonemeSequence seq;
  std::istringstream words(transcript);
  std::string raw;
  while (words >> raw) {
    const std::string word = clean_word(raw);
    if (word.empty()) continue;
    auto it = lexicon().find(word);
    if (it != lexicon().end()) {
      for (const auto& p : it->second) {
        seq.symbols.push_back(p);
        seq.ids.push_back(phone_id(p));
      }
    } else {
      for (char c : word) {  // character fallback
        const std::string tok = std::string("@") + c;
        seq.symbols.push_back(tok);
        seq.ids.push_back(phone_id(tok));
      }
    }
  }
  require(!seq.empty(), "phonemize: transcript produced no tokens: \"" + transcript + "\"");
  return seq;
}

std::string serialize(const PhonemeSequence& seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.symbols.size(); ++i) {
    if (i) out += ' ';
    out += seq.symbols[i];
  }
  return out;
}

PhonemeSequence parse_phonemes(const std::string& serialized) {
  PhonemeSequence seq;
  std::istringstream in(serialized);
  std::string tok;
  while (in >> tok) {
    const int id = phone_id(tok);
    require(id >= 0, "parse_phonemes: unknown phone symbol \"" + tok + "\"");
    seq.symbols.push_back(tok);
    seq.ids.push_back(id);
  }
  require(!seq.empty(), "parse_phonemes: empty phoneme string");
  return seq;
}

std::size_t serialized_bytes(const PhonemeSequence& seq) {
  return serialize(seq).size();
}

}  // namespace tec::text
