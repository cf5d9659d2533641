#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "zpres/corpus.hpp"
#include "zpres/tape.hpp"

namespace zpres {

// Trainable word lookup table. The backing parameter has one extra column at
// index vocab_size() holding the unknown-word vector, so out-of-vocabulary
// words share a single trained embedding.
class Embeddings {
 public:
  Embeddings() = default;
  Embeddings(std::vector<std::string> words, std::size_t dim);

  // Text format: first line "|V| d", then one "word f1 ... fd" row per word.
  static Embeddings load(const std::string& path, std::size_t expected_dim);

  std::size_t dim() const { return dim_; }
  std::size_t vocab_size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  // vocab_size() for out-of-vocabulary words (the unk column)
  std::size_t column_of(const std::string& word) const;
  // copy of the stored column (unk for OOV words)
  Tensor lookup(const std::string& word) const;

  Parameter& table() { return table_; }
  const Parameter& table() const { return table_; }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  Parameter table_;  // dim x (vocab_size + 1)
};

// Sorted unique non-placeholder token forms.
std::vector<std::string> collect_vocab(const std::vector<Document>& corpus);

}  // namespace zpres
