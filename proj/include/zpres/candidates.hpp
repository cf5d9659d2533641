#pragma once

#include <optional>

#include "zpres/corpus.hpp"
#include "zpres/tensor.hpp"

namespace zpres {

// Candidate antecedent: an NP constituent with a resolved head token and the
// coreference chain it belongs to, if any.
struct NPSpan {
  std::size_t sentence_idx = 0;
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::size_t head_index = 0;
  std::optional<int> chain_id;
  const ParseNode* node = nullptr;
};

bool is_np_label(const std::string& label);

// NP constituents from the gap's sentence and the two before it that end
// strictly before the gap. A node qualifies when it is a maximal NP (no NP
// ancestor) or a modifier NP (its parent is an NP). Spans made only of zero
// pronoun placeholders are skipped, duplicates by span collapse to one entry,
// and the result is ordered by textual position (this order feeds the
// candidate-set encoder).
std::vector<NPSpan> extract_candidates(const ZeroPronoun& zp, const Document& doc);

// Rightmost token with a noun part of speech (POS starting with 'N');
// rightmost token of the span when there is none.
std::size_t find_head(const ParseNode& np, const Sentence& sentence);

inline constexpr const char* kFeatureSchemaVersion = "v1";
inline constexpr std::size_t kFeatureDim = 12;

// v1 schema, all entries in [0, 1]:
//   0-2  sentence distance one-hot (same, one back, two back)
//   3    head is a pronoun
//   4    candidate is a subject (leftmost child of a clause node)
//   5    candidate is an object (direct child of a VP)
//   6    span length, clipped at 8, / 8
//   7    rank / k (rank is 1-based textual order)
//   8    candidate is the closest to the gap
//   9    gap is sentence-initial
//   10   first word after the gap is a verb
//   11   head word equals another candidate's head word
Tensor handcrafted_features(const ZeroPronoun& zp, const NPSpan& np, const Document& doc,
                            std::size_t candidate_rank, std::size_t k);

// Same schema for a whole candidate list at once.
std::vector<Tensor> features_for_candidates(const ZeroPronoun& zp,
                                            const std::vector<NPSpan>& candidates,
                                            const Document& doc);

// 1 iff both sides carry the same chain id.
int label(const ZeroPronoun& zp, const NPSpan& np);

}  // namespace zpres
