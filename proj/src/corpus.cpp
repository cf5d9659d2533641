#include "zpres/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "zpres/error.hpp"

namespace zpres {

bool operator==(const Token& a, const Token& b) {
  return a.index == b.index && a.form == b.form && a.pos == b.pos;
}

bool tree_equal(const ParseNode& a, const ParseNode& b) {
  if (a.label != b.label || a.start != b.start || a.end != b.end ||
      a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!tree_equal(*a.children[i], *b.children[i])) return false;
  return true;
}

const char* genre_name(Genre g) {
  switch (g) {
    case Genre::NW: return "NW";
    case Genre::MZ: return "MZ";
    case Genre::WB: return "WB";
    case Genre::BN: return "BN";
    case Genre::BC: return "BC";
    case Genre::TC: return "TC";
    case Genre::SYN: return "SYN";
  }
  return "SYN";
}

Genre genre_from_id(const std::string& doc_id) {
  std::string prefix = doc_id.substr(0, doc_id.find('/'));
  std::transform(prefix.begin(), prefix.end(), prefix.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (prefix == "nw") return Genre::NW;
  if (prefix == "mz") return Genre::MZ;
  if (prefix == "wb") return Genre::WB;
  if (prefix == "bn") return Genre::BN;
  if (prefix == "bc") return Genre::BC;
  if (prefix == "tc") return Genre::TC;
  return Genre::SYN;
}

bool operator==(const ZeroPronoun& a, const ZeroPronoun& b) {
  return a.sentence_idx == b.sentence_idx && a.gap_index == b.gap_index &&
         a.chain_id == b.chain_id;
}

bool Document::span_has_content(const MentionSpan& s) const {
  const Sentence& sent = sentences[s.sentence];
  for (std::size_t i = s.start; i < s.end; ++i)
    if (!sent.tokens[i].is_zp_placeholder()) return true;
  return false;
}

bool Document::anaphoric(const ZeroPronoun& zp) const {
  if (!zp.chain_id) return false;
  auto it = chains.find(*zp.chain_id);
  if (it == chains.end()) return false;
  for (const MentionSpan& s : it->second) {
    bool precedes = s.sentence < zp.sentence_idx ||
                    (s.sentence == zp.sentence_idx && s.end <= zp.gap_index);
    if (precedes && span_has_content(s)) return true;
  }
  return false;
}

bool operator==(const Document& a, const Document& b) {
  if (a.id != b.id || a.part != b.part || a.genre != b.genre || a.chains != b.chains ||
      !(a.zps == b.zps) || a.sentences.size() != b.sentences.size())
    return false;
  for (std::size_t i = 0; i < a.sentences.size(); ++i) {
    if (!(a.sentences[i].tokens == b.sentences[i].tokens)) return false;
    if (!tree_equal(a.sentences[i].tree, b.sentences[i].tree)) return false;
  }
  return true;
}

namespace {

struct LineError {
  static ParseError at(std::size_t line_no, const std::string& what) {
    return ParseError("line " + std::to_string(line_no) + ": " + what);
  }
};

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

bool is_implicit_preterminal(const ParseNode& n, const std::vector<Token>& tokens) {
  return n.children.empty() && n.end == n.start + 1 && n.label == tokens[n.start].pos;
}

// Parse bits carry constituents only; part-of-speech nodes are implicit. Give
// every token a preterminal node so that children partition each span.
void insert_preterminals(ParseNode& n, const std::vector<Token>& tokens) {
  if (n.children.empty()) {
    if (is_implicit_preterminal(n, tokens)) return;
    for (std::size_t i = n.start; i < n.end; ++i) {
      auto leaf = std::make_unique<ParseNode>();
      leaf->label = tokens[i].pos;
      leaf->start = i;
      leaf->end = i + 1;
      n.children.push_back(std::move(leaf));
    }
    return;
  }
  for (auto& c : n.children) insert_preterminals(*c, tokens);
  std::vector<std::unique_ptr<ParseNode>> rebuilt;
  std::size_t pos = n.start, ci = 0;
  while (pos < n.end) {
    if (ci < n.children.size() && n.children[ci]->start == pos) {
      pos = n.children[ci]->end;
      rebuilt.push_back(std::move(n.children[ci]));
      ++ci;
    } else {
      auto leaf = std::make_unique<ParseNode>();
      leaf->label = tokens[pos].pos;
      leaf->start = pos;
      leaf->end = pos + 1;
      rebuilt.push_back(std::move(leaf));
      ++pos;
    }
  }
  n.children = std::move(rebuilt);
}

// Assembles one sentence worth of rows into tokens, a tree, chain spans and
// zero pronouns.
class SentenceBuilder {
 public:
  void add_row(std::size_t line_no, const std::vector<std::string>& cols) {
    std::size_t idx = tokens_.size();
    std::size_t declared = 0;
    try {
      declared = static_cast<std::size_t>(std::stoul(cols[2]));
    } catch (const std::exception&) {
      throw LineError::at(line_no, "bad token index '" + cols[2] + "'");
    }
    if (declared != idx)
      throw LineError::at(line_no, "non-contiguous token index " + std::to_string(declared) +
                                       ", expected " + std::to_string(idx));
    tokens_.push_back(Token{idx, cols[3], cols[4]});
    consume_parse_bit(line_no, cols[5], idx);
    consume_coref(line_no, cols[6], idx);
  }

  bool empty() const { return tokens_.empty(); }

  void finish(std::size_t line_no, std::size_t sentence_idx, Document& doc) {
    if (!open_nodes_.empty())
      throw LineError::at(line_no, "unbalanced parse bits: " +
                                       std::to_string(open_nodes_.size()) +
                                       " constituent(s) left open");
    if (roots_.size() != 1)
      throw LineError::at(line_no,
                          "expected one parse root, got " + std::to_string(roots_.size()));
    for (const auto& [id, starts] : open_mentions_)
      if (!starts.empty())
        throw LineError::at(line_no, "coref chain " + std::to_string(id) +
                                         " left open at sentence end");
    Sentence s;
    s.tokens = std::move(tokens_);
    s.tree = std::move(*roots_[0]);
    if (s.tree.start != 0 || s.tree.end != s.tokens.size())
      throw LineError::at(line_no, "parse root does not cover the sentence");
    insert_preterminals(s.tree, s.tokens);
    for (const auto& [start, end, id] : mentions_)
      doc.chains[id].insert(MentionSpan{sentence_idx, start, end});
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (!s.tokens[i].is_zp_placeholder()) continue;
      ZeroPronoun zp;
      zp.sentence_idx = sentence_idx;
      zp.gap_index = i;
      for (const auto& [start, end, id] : mentions_)
        if (start == i && end == i + 1) {
          zp.chain_id = id;
          break;
        }
      doc.zps.push_back(zp);
    }
    doc.sentences.push_back(std::move(s));
    reset();
  }

 private:
  void reset() {
    tokens_.clear();
    open_nodes_.clear();
    roots_.clear();
    mentions_.clear();
    open_mentions_.clear();
  }

  void consume_parse_bit(std::size_t line_no, const std::string& bit, std::size_t idx) {
    std::size_t i = 0;
    bool leaf_seen = false;
    while (i < bit.size()) {
      char c = bit[i];
      if (c == '(') {
        std::size_t j = i + 1;
        while (j < bit.size() && bit[j] != '(' && bit[j] != '*' && bit[j] != ')') ++j;
        if (j == i + 1) throw LineError::at(line_no, "empty constituent label in '" + bit + "'");
        auto node = std::make_unique<ParseNode>();
        node->label = bit.substr(i + 1, j - i - 1);
        node->start = idx;
        open_nodes_.push_back(std::move(node));
        i = j;
      } else if (c == '*') {
        if (leaf_seen) throw LineError::at(line_no, "two leaves in parse bit '" + bit + "'");
        leaf_seen = true;
        ++i;
      } else if (c == ')') {
        if (!leaf_seen)
          throw LineError::at(line_no, "closing before leaf in parse bit '" + bit + "'");
        if (open_nodes_.empty())
          throw LineError::at(line_no, "unbalanced parse bits: extra ')' in '" + bit + "'");
        auto node = std::move(open_nodes_.back());
        open_nodes_.pop_back();
        node->end = idx + 1;
        if (open_nodes_.empty())
          roots_.push_back(std::move(node));
        else
          open_nodes_.back()->children.push_back(std::move(node));
        ++i;
      } else {
        throw LineError::at(line_no, std::string("unexpected character '") + c +
                                         "' in parse bit '" + bit + "'");
      }
    }
    if (!leaf_seen) throw LineError::at(line_no, "parse bit '" + bit + "' has no leaf");
  }

  void consume_coref(std::size_t line_no, const std::string& field, std::size_t idx) {
    if (field == "-") return;
    std::size_t pos = 0;
    while (pos < field.size()) {
      std::size_t bar = field.find('|', pos);
      std::string item =
          field.substr(pos, bar == std::string::npos ? std::string::npos : bar - pos);
      pos = bar == std::string::npos ? field.size() : bar + 1;
      if (item.empty()) throw LineError::at(line_no, "empty coref item in '" + field + "'");
      bool opens = item.front() == '(';
      bool closes = item.back() == ')';
      std::string digits = item.substr(opens ? 1 : 0,
                                       item.size() - (opens ? 1 : 0) - (closes ? 1 : 0));
      if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw LineError::at(line_no, "bad coref item '" + item + "'");
      int id = std::stoi(digits);
      if (opens && closes) {
        mentions_.emplace_back(idx, idx + 1, id);
      } else if (opens) {
        open_mentions_[id].push_back(idx);
      } else if (closes) {
        auto& starts = open_mentions_[id];
        if (starts.empty())
          throw LineError::at(line_no, "coref chain " + std::to_string(id) +
                                           " closed without matching open");
        mentions_.emplace_back(starts.back(), idx + 1, id);
        starts.pop_back();
      } else {
        throw LineError::at(line_no, "bad coref item '" + item + "'");
      }
    }
  }

  std::vector<Token> tokens_;
  std::vector<std::unique_ptr<ParseNode>> open_nodes_;
  std::vector<std::unique_ptr<ParseNode>> roots_;
  std::vector<std::tuple<std::size_t, std::size_t, int>> mentions_;  // start, end, chain
  std::map<int, std::vector<std::size_t>> open_mentions_;
};

}  // namespace

std::vector<Document> parse_conll_text(const std::string& text) {
  std::vector<Document> docs;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  bool in_doc = false;
  Document doc;
  SentenceBuilder builder;

  auto flush_sentence = [&]() {
    if (!builder.empty()) builder.finish(line_no, doc.sentences.size(), doc);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("#begin document", 0) == 0) {
      if (in_doc) throw LineError::at(line_no, "#begin document inside a document");
      in_doc = true;
      doc = Document{};
      std::string rest = line.substr(std::string("#begin document").size());
      std::size_t first = rest.find_first_not_of(" \t");
      doc.id = first == std::string::npos ? "" : rest.substr(first);
      doc.genre = genre_from_id(doc.id);
      continue;
    }
    if (line.rfind("#end document", 0) == 0) {
      if (!in_doc) throw LineError::at(line_no, "#end document without #begin");
      flush_sentence();
      docs.push_back(std::move(doc));
      in_doc = false;
      continue;
    }
    std::string stripped = line;
    if (stripped.find_first_not_of(" \t") == std::string::npos) {
      if (in_doc) flush_sentence();
      continue;
    }
    if (!in_doc) throw LineError::at(line_no, "token row outside a document");
    auto cols = split_ws(line);
    if (cols.size() != 7)
      throw LineError::at(line_no,
                          "expected 7 columns, got " + std::to_string(cols.size()));
    if (doc.sentences.empty() && builder.empty()) doc.part = cols[1];
    if (cols[1] != doc.part)
      throw LineError::at(line_no, "part changed inside a document block");
    builder.add_row(line_no, cols);
  }
  if (in_doc) throw LineError::at(line_no, "missing #end document");
  return docs;
}

std::vector<Document> parse_conll(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open corpus file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return parse_conll_text(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

namespace {

void collect_opens(const ParseNode& n, std::size_t idx, const std::vector<Token>& tokens,
                   std::vector<const ParseNode*>& out) {
  if (is_implicit_preterminal(n, tokens)) return;
  if (n.start == idx) out.push_back(&n);
  for (const auto& c : n.children)
    if (c->start <= idx && idx < c->end) collect_opens(*c, idx, tokens, out);
}

std::size_t count_closes(const ParseNode& n, std::size_t idx, const std::vector<Token>& tokens) {
  if (is_implicit_preterminal(n, tokens)) return 0;
  std::size_t count = n.end == idx + 1 ? 1 : 0;
  for (const auto& c : n.children)
    if (c->start <= idx && idx < c->end) count += count_closes(*c, idx, tokens);
  return count;
}

std::string parse_bit(const Sentence& s, std::size_t idx) {
  std::vector<const ParseNode*> opens;
  collect_opens(s.tree, idx, s.tokens, opens);
  std::string bit;
  for (const ParseNode* n : opens) bit += "(" + n->label;
  bit += "*";
  bit.append(count_closes(s.tree, idx, s.tokens), ')');
  return bit;
}

std::string coref_field(const Document& doc, std::size_t sent, std::size_t idx) {
  std::vector<std::string> items;
  // opens (multi-token), then singletons, then closes; ids ascending inside
  // each group. The parser accepts any order.
  for (const auto& [id, spans] : doc.chains)
    for (const MentionSpan& m : spans)
      if (m.sentence == sent && m.start == idx && m.end > idx + 1)
        items.push_back("(" + std::to_string(id));
  for (const auto& [id, spans] : doc.chains)
    for (const MentionSpan& m : spans)
      if (m.sentence == sent && m.start == idx && m.end == idx + 1)
        items.push_back("(" + std::to_string(id) + ")");
  for (const auto& [id, spans] : doc.chains)
    for (const MentionSpan& m : spans)
      if (m.sentence == sent && m.end == idx + 1 && m.start < idx)
        items.push_back(std::to_string(id) + ")");
  if (items.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += "|";
    out += items[i];
  }
  return out;
}

}  // namespace

std::string to_conll(const std::vector<Document>& docs) {
  std::ostringstream out;
  for (const Document& doc : docs) {
    out << "#begin document " << doc.id << "\n";
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      const Sentence& sent = doc.sentences[s];
      for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
        const Token& t = sent.tokens[i];
        out << doc.id << " " << doc.part << " " << i << " " << t.form << " " << t.pos << " "
            << parse_bit(sent, i) << " " << coref_field(doc, s, i) << "\n";
      }
      out << "\n";
    }
    out << "#end document\n";
  }
  return out.str();
}

void write_conll(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot write corpus file: " + path);
  f << to_conll(docs);
}

}  // namespace zpres
