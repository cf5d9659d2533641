#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace zpres {

inline constexpr const char* kZpForm = "*pro*";
inline constexpr const char* kZpPos = "-NONE-";

struct Token {
  std::size_t index = 0;  // 0-based position in its sentence
  std::string form;
  std::string pos;

  bool is_zp_placeholder() const { return form == kZpForm && pos == kZpPos; }
};

bool operator==(const Token& a, const Token& b);

// Constituent node. Leaves of the bracketing align with token positions;
// part-of-speech lives on Token, not here.
struct ParseNode {
  std::string label;
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::vector<std::unique_ptr<ParseNode>> children;
};

bool tree_equal(const ParseNode& a, const ParseNode& b);

struct Sentence {
  std::vector<Token> tokens;
  ParseNode tree;
};

struct MentionSpan {
  std::size_t sentence = 0;
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive

  auto operator<=>(const MentionSpan&) const = default;
};

enum class Genre { NW, MZ, WB, BN, BC, TC, SYN };

const char* genre_name(Genre g);
Genre genre_from_id(const std::string& doc_id);  // prefix before '/'; unknown -> SYN

struct ZeroPronoun {
  std::size_t sentence_idx = 0;
  std::size_t gap_index = 0;  // token position of the *pro* placeholder
  std::optional<int> chain_id;
};

bool operator==(const ZeroPronoun& a, const ZeroPronoun& b);

struct Document {
  std::string id;
  std::string part = "000";
  Genre genre = Genre::SYN;
  std::vector<Sentence> sentences;
  std::map<int, std::set<MentionSpan>> chains;
  std::vector<ZeroPronoun> zps;

  // A chain span counts as an NP mention if it contains at least one
  // non-placeholder token.
  bool span_has_content(const MentionSpan& s) const;
  // Coreferent with at least one NP mention strictly before the gap.
  bool anaphoric(const ZeroPronoun& zp) const;
};

bool operator==(const Document& a, const Document& b);

std::vector<Document> parse_conll(const std::string& path);
std::vector<Document> parse_conll_text(const std::string& text);
std::string to_conll(const std::vector<Document>& docs);
void write_conll(const std::string& path, const std::vector<Document>& docs);

}  // namespace zpres
