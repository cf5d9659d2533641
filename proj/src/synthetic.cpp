#include "zpres/synthetic.hpp"

#include <array>
#include <cstdio>

#include "zpres/error.hpp"
#include "zpres/rng.hpp"

namespace zpres {

const char* distractor_mode_name(DistractorMode m) {
  switch (m) {
    case DistractorMode::off: return "off";
    case DistractorMode::global: return "global";
    case DistractorMode::longrange: return "longrange";
  }
  return "off";
}

DistractorMode distractor_mode_from_name(const std::string& name) {
  if (name == "off") return DistractorMode::off;
  if (name == "global") return DistractorMode::global;
  if (name == "longrange") return DistractorMode::longrange;
  throw ConfigError("unknown distractor mode: " + name);
}

namespace {

using NodePtr = std::unique_ptr<ParseNode>;

const std::array<const char*, 4> kAgents{"captain", "teacher", "doctor", "farmer"};
const std::array<const char*, 16> kObjects{"book",   "novel",  "letter", "report",
                                           "apple",  "cake",   "noodle", "bun",
                                           "hammer", "ladder", "rope",   "brush",
                                           "market", "harbor", "temple", "garden"};
const std::array<const char*, 4> kSentVerbs{"saw", "found", "brought", "mentioned"};
const std::array<const char*, 4> kGapVerbs{"smiled", "waved", "nodded", "spoke"};
const std::array<const char*, 4> kAdverbs{"then", "later", "soon", "meanwhile"};
const char* kCueHead = "signal_head";
const char* kCueTail = "signal_tail";
constexpr std::size_t kCoreLexicon = 31;  // nouns + verbs + adverbs + cues + period

template <std::size_t N>
const char* pick(Rng& rng, const std::array<const char*, N>& pool) {
  return pool[rng.next_index(N)];
}

NodePtr pre(const char* label, std::size_t i) {
  auto n = std::make_unique<ParseNode>();
  n->label = label;
  n->start = i;
  n->end = i + 1;
  return n;
}

NodePtr wrap(const char* label, std::vector<NodePtr> children) {
  auto n = std::make_unique<ParseNode>();
  n->label = label;
  n->start = children.front()->start;
  n->end = children.back()->end;
  n->children = std::move(children);
  return n;
}

NodePtr wrap1(const char* label, NodePtr child) {
  std::vector<NodePtr> cs;
  cs.push_back(std::move(child));
  return wrap(label, std::move(cs));
}

Token tok(std::size_t i, std::string form, std::string pos) {
  return Token{i, std::move(form), std::move(pos)};
}

// "subj verb obj ."
Sentence statement(const std::string& subj, const std::string& verb, const std::string& obj) {
  Sentence s;
  s.tokens = {tok(0, subj, "NN"), tok(1, verb, "VV"), tok(2, obj, "NN"), tok(3, ".", "PU")};
  std::vector<NodePtr> vp;
  vp.push_back(pre("VV", 1));
  vp.push_back(wrap1("NP", pre("NN", 2)));
  std::vector<NodePtr> ip;
  ip.push_back(wrap1("NP", pre("NN", 0)));
  ip.push_back(wrap("VP", std::move(vp)));
  ip.push_back(pre("PU", 3));
  s.tree = std::move(*wrap1("TOP", wrap("IP", std::move(ip))));
  return s;
}

// "adv *pro* verb obj ."  (gap at index 1)
Sentence gap_mid(const std::string& adv, const std::string& verb, const std::string& obj) {
  Sentence s;
  s.tokens = {tok(0, adv, "AD"), tok(1, kZpForm, kZpPos), tok(2, verb, "VV"),
              tok(3, obj, "NN"), tok(4, ".", "PU")};
  std::vector<NodePtr> vp;
  vp.push_back(pre("VV", 2));
  vp.push_back(wrap1("NP", pre("NN", 3)));
  std::vector<NodePtr> ip;
  ip.push_back(wrap1("ADVP", pre("AD", 0)));
  ip.push_back(wrap1("NP", pre(kZpPos, 1)));
  ip.push_back(wrap("VP", std::move(vp)));
  ip.push_back(pre("PU", 4));
  s.tree = std::move(*wrap1("TOP", wrap("IP", std::move(ip))));
  return s;
}

// "*pro* adv adv verb obj ."  (gap at index 0, verb three tokens away)
Sentence gap_initial(const std::string& adv1, const std::string& adv2, const std::string& verb,
                     const std::string& obj) {
  Sentence s;
  s.tokens = {tok(0, kZpForm, kZpPos), tok(1, adv1, "AD"), tok(2, adv2, "AD"),
              tok(3, verb, "VV"),      tok(4, obj, "NN"),  tok(5, ".", "PU")};
  std::vector<NodePtr> vp;
  vp.push_back(pre("VV", 3));
  vp.push_back(wrap1("NP", pre("NN", 4)));
  std::vector<NodePtr> ip;
  ip.push_back(wrap1("NP", pre(kZpPos, 0)));
  ip.push_back(wrap1("ADVP", pre("AD", 1)));
  ip.push_back(wrap1("ADVP", pre("AD", 2)));
  ip.push_back(wrap("VP", std::move(vp)));
  ip.push_back(pre("PU", 5));
  s.tree = std::move(*wrap1("TOP", wrap("IP", std::move(ip))));
  return s;
}

// "cue verb f1 f2 f3 f4 f5 dup dup ."
Sentence cue_statement(const std::string& cue, const std::string& verb,
                       const std::vector<std::string>& fillers, const std::string& dup) {
  Sentence s;
  s.tokens.push_back(tok(0, cue, "NN"));
  s.tokens.push_back(tok(1, verb, "VV"));
  for (std::size_t i = 0; i < 5; ++i) s.tokens.push_back(tok(2 + i, fillers[i], "AD"));
  s.tokens.push_back(tok(7, dup, "NN"));
  s.tokens.push_back(tok(8, dup, "NN"));
  s.tokens.push_back(tok(9, ".", "PU"));

  std::vector<NodePtr> vp;
  vp.push_back(pre("VV", 1));
  for (std::size_t i = 0; i < 5; ++i) vp.push_back(wrap1("ADVP", pre("AD", 2 + i)));
  vp.push_back(wrap1("NP", pre("NN", 7)));
  vp.push_back(wrap1("NP", pre("NN", 8)));
  std::vector<NodePtr> ip;
  ip.push_back(wrap1("NP", pre("NN", 0)));
  ip.push_back(wrap("VP", std::move(vp)));
  ip.push_back(pre("PU", 9));
  s.tree = std::move(*wrap1("TOP", wrap("IP", std::move(ip))));
  return s;
}

// "*pro* verb ."
Sentence gap_bare(const std::string& verb) {
  Sentence s;
  s.tokens = {tok(0, kZpForm, kZpPos), tok(1, verb, "VV"), tok(2, ".", "PU")};
  std::vector<NodePtr> ip;
  ip.push_back(wrap1("NP", pre(kZpPos, 0)));
  ip.push_back(wrap1("VP", pre("VV", 1)));
  ip.push_back(pre("PU", 2));
  s.tree = std::move(*wrap1("TOP", wrap("IP", std::move(ip))));
  return s;
}

}  // namespace

std::vector<Document> generate_synthetic(std::uint64_t seed, const SyntheticSpec& spec) {
  Rng rng(seed);
  std::size_t filler_count =
      spec.vocab_size > kCoreLexicon ? spec.vocab_size - kCoreLexicon : 2;
  std::vector<std::string> fillers;
  for (std::size_t i = 0; i < filler_count; ++i) fillers.push_back("pad_" + std::to_string(i));
  auto pick_filler = [&]() { return fillers[rng.next_index(fillers.size())]; };

  std::vector<Document> docs;
  for (std::size_t d = 0; d < spec.n_docs; ++d) {
    Document doc;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "syn/doc_%04zu", d);
    doc.id = buf;
    doc.genre = Genre::SYN;

    int next_chain = 1;
    std::size_t scenes = spec.sentences_per_doc / 2;
    for (std::size_t sc = 0; sc < scenes; ++sc) {
      std::size_t sent_a = doc.sentences.size();
      int chain = next_chain++;

      if (spec.distractor_mode == DistractorMode::global) {
        bool cue_head = rng.next_bool();
        std::string dup = pick(rng, kObjects);
        std::vector<std::string> fs;
        for (int i = 0; i < 5; ++i) fs.push_back(pick_filler());
        doc.sentences.push_back(
            cue_statement(cue_head ? kCueHead : kCueTail, pick(rng, kSentVerbs), fs, dup));
        doc.sentences.push_back(gap_bare(pick(rng, kGapVerbs)));
        std::size_t target = cue_head ? 7 : 8;
        doc.chains[chain].insert(MentionSpan{sent_a, target, target + 1});
        doc.chains[chain].insert(MentionSpan{sent_a + 1, 0, 1});
        doc.zps.push_back(ZeroPronoun{sent_a + 1, 0, chain});
        continue;
      }

      std::string agent = pick(rng, kAgents);
      std::string other = pick(rng, kObjects);
      // subject 80% of the time: position features alone top out below the
      // acceptance bar, candidate content closes the rest
      bool agent_subject = rng.next_index(10) < 8;
      doc.sentences.push_back(statement(agent_subject ? agent : other,
                                        pick(rng, kSentVerbs),
                                        agent_subject ? other : agent));
      if (spec.distractor_mode == DistractorMode::longrange)
        doc.sentences.push_back(
            gap_initial(pick_filler(), pick_filler(), pick(rng, kGapVerbs), pick(rng, kObjects)));
      else
        doc.sentences.push_back(
            gap_mid(pick(rng, kAdverbs), pick(rng, kGapVerbs), pick(rng, kObjects)));

      std::size_t target = agent_subject ? 0 : 2;
      std::size_t gap = spec.distractor_mode == DistractorMode::longrange ? 0 : 1;
      doc.chains[chain].insert(MentionSpan{sent_a, target, target + 1});
      doc.chains[chain].insert(MentionSpan{sent_a + 1, gap, gap + 1});
      doc.zps.push_back(ZeroPronoun{sent_a + 1, gap, chain});
    }
    if (spec.sentences_per_doc % 2 == 1)
      doc.sentences.push_back(
          statement(pick(rng, kAgents), pick(rng, kSentVerbs), pick(rng, kObjects)));

    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace zpres
