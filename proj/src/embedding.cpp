#include "zpres/embedding.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "zpres/error.hpp"

namespace zpres {

Embeddings::Embeddings(std::vector<std::string> words, std::size_t dim)
    : dim_(dim), words_(std::move(words)) {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second)
      throw ParseError("duplicate word in vocabulary: " + words_[i]);
  }
  table_ = Parameter("embeddings", Tensor::zeros({dim_, words_.size() + 1}));
}

Embeddings Embeddings::load(const std::string& path, std::size_t expected_dim) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open embedding file: " + path);
  std::string header;
  if (!std::getline(f, header)) throw ParseError(path + ": empty embedding file");
  std::istringstream hs(header);
  std::size_t count = 0, dim = 0;
  if (!(hs >> count >> dim))
    throw ParseError(path + ": bad header '" + header + "', expected '|V| d'");
  if (dim != expected_dim)
    throw ParseError(path + ": embedding dim " + std::to_string(dim) +
                     " does not match configured dim " + std::to_string(expected_dim));

  std::vector<std::string> words;
  std::vector<std::vector<double>> columns;
  words.reserve(count);
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream is(line);
    std::string word;
    is >> word;
    std::vector<double> vec(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (!(is >> vec[i]))
        throw ParseError(path + " line " + std::to_string(line_no) + ": malformed value " +
                         std::to_string(i + 1) + " for word '" + word + "'");
    }
    double extra;
    if (is >> extra)
      throw ParseError(path + " line " + std::to_string(line_no) + ": too many values for '" +
                       word + "'");
    words.push_back(word);
    columns.push_back(std::move(vec));
  }
  if (words.size() != count)
    throw ParseError(path + ": header declares " + std::to_string(count) + " words, found " +
                     std::to_string(words.size()));

  Embeddings emb;
  try {
    emb = Embeddings(std::move(words), dim);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
  for (std::size_t c = 0; c < columns.size(); ++c)
    for (std::size_t r = 0; r < dim; ++r) emb.table_.value.at(r, c) = columns[c][r];
  return emb;
}

std::size_t Embeddings::column_of(const std::string& word) const {
  auto it = index_.find(word);
  return it == index_.end() ? words_.size() : it->second;
}

Tensor Embeddings::lookup(const std::string& word) const {
  std::size_t c = column_of(word);
  Tensor out = Tensor::zeros({dim_});
  for (std::size_t r = 0; r < dim_; ++r) out.data[r] = table_.value.at(r, c);
  return out;
}

std::vector<std::string> collect_vocab(const std::vector<Document>& corpus) {
  std::set<std::string> forms;
  for (const Document& doc : corpus)
    for (const Sentence& s : doc.sentences)
      for (const Token& t : s.tokens)
        if (!t.is_zp_placeholder()) forms.insert(t.form);
  return {forms.begin(), forms.end()};
}

}  // namespace zpres
