#pragma once

#include <string>
#include <vector>

#include "tec/common.hpp"

namespace tec::text {

/// Tokenized source text: phone symbols plus their ids in the fixed inventory.
struct PhonemeSequence {
  std::vector<std::string> symbols;
  std::vector<int> ids;

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
};

// The fixed phone set: 39 ARPABET phones followed by character-fallback
// tokens "@a".."@z" for words missing from the lexicon. Ids are indices
// into this list and are stable across runs and versions.
const std::vector<std::string>& phone_inventory();

int phone_id(const std::string& symbol);  // -1 if unknown
int vocab_size();

// Lexicon lookup with character fallback. Words are lowercased and stripped
// of punctuation before lookup.
PhonemeSequence phonemize(const std::string& transcript);

// Wire form used in manifests and for side-input accounting: symbols joined
// by single spaces, UTF-8.
std::string serialize(const PhonemeSequence& seq);
PhonemeSequence parse_phonemes(const std::string& serialized);

std::size_t serialized_bytes(const PhonemeSequence& seq);

}  // namespace tec::text
