#pragma once

#include <cstdint>

#include "zpres/corpus.hpp"

namespace zpres {

// What makes the planted antecedent findable:
//   off       - candidate content and features; one agent-class noun per
//               candidate window is the antecedent (subject 80% of the time).
//   global    - two same-word candidate NPs; a cue NP earlier in the
//               candidate sequence says which of the two is correct, so only
//               the candidate-set encoder can tell them apart. Filler words
//               keep the cue outside every local context window.
//   longrange - like off, but the zero pronoun opens the sentence and the
//               verb agreeing with the antecedent sits several tokens after
//               the gap, past a one-word context window.
enum class DistractorMode { off, global, longrange };

struct SyntheticSpec {
  std::size_t n_docs = 25;
  std::size_t sentences_per_doc = 16;  // two sentences per zero pronoun
  std::size_t vocab_size = 48;         // steers the filler-word inventory
  DistractorMode distractor_mode = DistractorMode::off;
};

// Deterministic per seed. Every generated zero pronoun is anaphoric with its
// antecedent at most two sentences back.
std::vector<Document> generate_synthetic(std::uint64_t seed, const SyntheticSpec& spec);

const char* distractor_mode_name(DistractorMode m);
DistractorMode distractor_mode_from_name(const std::string& name);

}  // namespace zpres
