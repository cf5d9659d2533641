#include "zpres/candidates.hpp"

#include <algorithm>
#include <map>

namespace zpres {

bool is_np_label(const std::string& label) {
  return label == "NP" || label.rfind("NP-", 0) == 0;
}

namespace {

bool is_clause_label(const std::string& label) {
  return label == "IP" || label.rfind("IP-", 0) == 0 || label == "S" ||
         label.rfind("S-", 0) == 0;
}

bool all_placeholders(const Sentence& s, std::size_t start, std::size_t end) {
  for (std::size_t i = start; i < end; ++i)
    if (!s.tokens[i].is_zp_placeholder()) return false;
  return true;
}

void collect_np_nodes(const ParseNode& n, bool has_np_ancestor, const ParseNode* parent,
                      std::vector<std::pair<const ParseNode*, const ParseNode*>>& out) {
  bool np = is_np_label(n.label);
  if (np && (!has_np_ancestor || (parent && is_np_label(parent->label))))
    out.emplace_back(&n, parent);
  for (const auto& c : n.children) collect_np_nodes(*c, has_np_ancestor || np, &n, out);
}

std::optional<int> chain_of_span(const Document& doc, const MentionSpan& span) {
  for (const auto& [id, spans] : doc.chains)
    if (spans.count(span)) return id;
  return std::nullopt;
}

const ParseNode* find_parent(const ParseNode& root, const ParseNode* target) {
  for (const auto& c : root.children) {
    if (c.get() == target) return &root;
    if (c->start <= target->start && target->end <= c->end)
      if (const ParseNode* p = find_parent(*c, target)) return p;
  }
  return nullptr;
}

}  // namespace

std::vector<NPSpan> extract_candidates(const ZeroPronoun& zp, const Document& doc) {
  std::size_t first_sent = zp.sentence_idx >= 2 ? zp.sentence_idx - 2 : 0;
  std::vector<NPSpan> out;
  std::map<MentionSpan, bool> seen;
  for (std::size_t si = first_sent; si <= zp.sentence_idx; ++si) {
    const Sentence& sent = doc.sentences[si];
    std::vector<std::pair<const ParseNode*, const ParseNode*>> nodes;
    collect_np_nodes(sent.tree, false, nullptr, nodes);
    for (auto [node, parent] : nodes) {
      (void)parent;
      if (si == zp.sentence_idx && node->end > zp.gap_index) continue;
      if (all_placeholders(sent, node->start, node->end)) continue;
      MentionSpan span{si, node->start, node->end};
      if (seen[span]) continue;
      seen[span] = true;
      NPSpan c;
      c.sentence_idx = si;
      c.start = node->start;
      c.end = node->end;
      c.head_index = find_head(*node, sent);
      c.chain_id = chain_of_span(doc, span);
      c.node = node;
      out.push_back(c);
    }
  }
  std::sort(out.begin(), out.end(), [](const NPSpan& a, const NPSpan& b) {
    return std::tie(a.sentence_idx, a.start, a.end) < std::tie(b.sentence_idx, b.start, b.end);
  });
  return out;
}

std::size_t find_head(const ParseNode& np, const Sentence& sentence) {
  for (std::size_t i = np.end; i > np.start; --i)
    if (sentence.tokens[i - 1].pos.rfind('N', 0) == 0) return i - 1;
  return np.end - 1;
}

namespace {

Tensor features_impl(const ZeroPronoun& zp, const NPSpan& np, const Document& doc,
                     std::size_t rank, std::size_t k, bool head_match) {
  Tensor v = Tensor::zeros({kFeatureDim});
  std::size_t dist = zp.sentence_idx - np.sentence_idx;
  if (dist < 3) v.data[dist] = 1.0;

  const Sentence& np_sent = doc.sentences[np.sentence_idx];
  const std::string& head_pos = np_sent.tokens[np.head_index].pos;
  if (head_pos.rfind("PN", 0) == 0 || head_pos.rfind("PRP", 0) == 0) v.data[3] = 1.0;

  if (np.node) {
    const ParseNode* parent = find_parent(np_sent.tree, np.node);
    if (parent && is_clause_label(parent->label) && !parent->children.empty() &&
        parent->children.front().get() == np.node)
      v.data[4] = 1.0;
    if (parent && parent->label.rfind("VP", 0) == 0) v.data[5] = 1.0;
  }

  double len = static_cast<double>(np.end - np.start);
  v.data[6] = std::min(len, 8.0) / 8.0;
  v.data[7] = k > 0 ? static_cast<double>(rank) / static_cast<double>(k) : 0.0;
  v.data[8] = rank == k ? 1.0 : 0.0;

  const Sentence& zp_sent = doc.sentences[zp.sentence_idx];
  bool initial = true;
  for (std::size_t i = 0; i < zp.gap_index; ++i)
    if (!zp_sent.tokens[i].is_zp_placeholder()) initial = false;
  v.data[9] = initial ? 1.0 : 0.0;
  for (std::size_t i = zp.gap_index + 1; i < zp_sent.tokens.size(); ++i) {
    if (zp_sent.tokens[i].is_zp_placeholder()) continue;
    if (zp_sent.tokens[i].pos.rfind('V', 0) == 0) v.data[10] = 1.0;
    break;
  }
  v.data[11] = head_match ? 1.0 : 0.0;
  return v;
}

std::string head_form(const NPSpan& np, const Document& doc) {
  return doc.sentences[np.sentence_idx].tokens[np.head_index].form;
}

}  // namespace

std::vector<Tensor> features_for_candidates(const ZeroPronoun& zp,
                                            const std::vector<NPSpan>& candidates,
                                            const Document& doc) {
  std::vector<Tensor> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool match = false;
    for (std::size_t j = 0; j < candidates.size(); ++j)
      if (j != i && head_form(candidates[j], doc) == head_form(candidates[i], doc)) match = true;
    out.push_back(features_impl(zp, candidates[i], doc, i + 1, candidates.size(), match));
  }
  return out;
}

Tensor handcrafted_features(const ZeroPronoun& zp, const NPSpan& np, const Document& doc,
                            std::size_t candidate_rank, std::size_t k) {
  std::vector<NPSpan> all = extract_candidates(zp, doc);
  bool match = false;
  for (const NPSpan& other : all) {
    if (other.sentence_idx == np.sentence_idx && other.start == np.start && other.end == np.end)
      continue;
    if (head_form(other, doc) == head_form(np, doc)) match = true;
  }
  return features_impl(zp, np, doc, candidate_rank, k, match);
}

int label(const ZeroPronoun& zp, const NPSpan& np) {
  return zp.chain_id && np.chain_id && *zp.chain_id == *np.chain_id ? 1 : 0;
}

}  // namespace zpres
