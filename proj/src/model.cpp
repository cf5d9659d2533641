#include "zpres/model.hpp"

#include <cstring>
#include <fstream>

#include "zpres/error.hpp"

namespace zpres {

const char* ablation_name(Ablation a) {
  switch (a) {
    case Ablation::full: return "full";
    case Ablation::local_only: return "local_only";
    case Ablation::global_only: return "global_only";
  }
  return "full";
}

Ablation ablation_from_name(const std::string& name) {
  if (name == "full") return Ablation::full;
  if (name == "local_only") return Ablation::local_only;
  if (name == "global_only") return Ablation::global_only;
  throw ConfigError("unknown ablation mode: " + name);
}

const char* zp_combine_name(ZpCombine c) {
  switch (c) {
    case ZpCombine::concat: return "concat";
    case ZpCombine::average: return "average";
    case ZpCombine::sum: return "sum";
  }
  return "concat";
}

ZpCombine zp_combine_from_name(const std::string& name) {
  if (name == "concat") return ZpCombine::concat;
  if (name == "average") return ZpCombine::average;
  if (name == "sum") return ZpCombine::sum;
  throw ConfigError("unknown zp_combine mode: " + name);
}

void ModelConfig::validate() const {
  if (embedding_dim == 0 || zp_hidden == 0 || global_hidden == 0 || local_hidden[0] == 0 ||
      local_hidden[1] == 0 || local_hidden[2] == 0)
    throw ConfigError("model dimensions must be positive");
  if (context_window != -1 && context_window < 1)
    throw ConfigError("context_window must be a positive count or 'all'");
  if (feature_dim != kFeatureDim)
    throw ConfigError("feature_dim " + std::to_string(feature_dim) +
                      " does not match feature schema " + kFeatureSchemaVersion + " (" +
                      std::to_string(kFeatureDim) + ")");
}

ModelParams::ModelParams(ModelConfig c, std::vector<std::string> vocab)
    : cfg(c),
      emb(std::move(vocab), c.embedding_dim),
      lstm_pre("lstm_pre", c.embedding_dim, c.zp_hidden),
      lstm_fol("lstm_fol", c.embedding_dim, c.zp_hidden),
      local_mlp("local_mlp", c.local_input_dim(), c.local_hidden[0], c.local_hidden[1],
                c.local_hidden[2]),
      global_fwd("global_fwd", c.local_hidden[2], c.global_hidden),
      global_bwd("global_bwd", c.local_hidden[2], c.global_hidden),
      scorer_w("scorer_w", Tensor::zeros({1, c.scorer_input_dim()})),
      scorer_b("scorer_b", Tensor::zeros({1})) {
  cfg.validate();
}

std::vector<Parameter*> ModelParams::all() {
  std::vector<Parameter*> out{&emb.table()};
  for (Parameter* p : lstm_pre.params()) out.push_back(p);
  for (Parameter* p : lstm_fol.params()) out.push_back(p);
  for (Parameter* p : local_mlp.params()) out.push_back(p);
  for (Parameter* p : global_fwd.params()) out.push_back(p);
  for (Parameter* p : global_bwd.params()) out.push_back(p);
  out.push_back(&scorer_w);
  out.push_back(&scorer_b);
  return out;
}

std::vector<Parameter*> ModelParams::trainable(bool fine_tune_embeddings) {
  std::vector<Parameter*> out = all();
  if (!fine_tune_embeddings) out.erase(out.begin());
  return out;
}

ModelParams init_params(const ModelConfig& cfg, std::vector<std::string> vocab,
                        double init_range, std::uint64_t seed) {
  ModelParams mp(cfg, std::move(vocab));
  Rng rng(seed);
  init_uniform(mp.all(), init_range, rng);
  return mp;
}

ModelParams init_params(const ModelConfig& cfg, const Embeddings& pretrained, double init_range,
                        std::uint64_t seed) {
  if (pretrained.dim() != cfg.embedding_dim)
    throw ConfigError("pretrained embedding dim " + std::to_string(pretrained.dim()) +
                      " does not match configured dim " + std::to_string(cfg.embedding_dim));
  ModelParams mp = init_params(cfg, pretrained.words(), init_range, seed);
  const Tensor& src = pretrained.table().value;
  Tensor& dst = mp.emb.table().value;
  for (std::size_t r = 0; r < cfg.embedding_dim; ++r)
    for (std::size_t c = 0; c < pretrained.vocab_size(); ++c) dst.at(r, c) = src.at(r, c);
  return mp;
}

namespace {

// Document positions of non-placeholder tokens, in reading order.
struct FlatDoc {
  std::vector<std::pair<std::size_t, std::size_t>> positions;  // (sentence, token)
  std::vector<std::vector<long>> flat_of;                      // -1 for placeholders

  explicit FlatDoc(const Document& doc) {
    flat_of.resize(doc.sentences.size());
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      flat_of[s].assign(doc.sentences[s].tokens.size(), -1);
      for (std::size_t i = 0; i < doc.sentences[s].tokens.size(); ++i) {
        if (doc.sentences[s].tokens[i].is_zp_placeholder()) continue;
        flat_of[s][i] = static_cast<long>(positions.size());
        positions.emplace_back(s, i);
      }
    }
  }

  const std::string& form(const Document& doc, std::size_t flat) const {
    auto [s, i] = positions[flat];
    return doc.sentences[s].tokens[i].form;
  }
};

// Per-tape bound model.
struct Graph {
  Tape& t;
  ModelParams& mp;
  const Document& doc;
  const FlatDoc flat;
  Var table;
  LstmVars pre, fol, gfwd, gbwd;
  MlpVars mlp;
  Var w_s, b_s;

  Graph(Tape& tape, ModelParams& params, const Document& d)
      : t(tape),
        mp(params),
        doc(d),
        flat(d),
        table(tape.leaf(params.emb.table())),
        pre(params.lstm_pre.bind(tape)),
        fol(params.lstm_fol.bind(tape)),
        gfwd(params.global_fwd.bind(tape)),
        gbwd(params.global_bwd.bind(tape)),
        mlp(params.local_mlp.bind(tape)),
        w_s(tape.leaf(params.scorer_w)),
        b_s(tape.leaf(params.scorer_b)) {}

  Var embed(const std::string& form) { return t.col(table, mp.emb.column_of(form)); }

  Var embed_flat(std::size_t flat_pos) { return embed(flat.form(doc, flat_pos)); }

  Var zero_vec(std::size_t dim) { return t.zeros(dim); }

  Var average(const std::vector<Var>& vars, std::size_t dim) {
    if (vars.empty()) return zero_vec(dim);
    return t.scale(t.sum(vars), 1.0 / static_cast<double>(vars.size()));
  }

  // Preceding context left to right, following context right to left, so both
  // recurrences end on the word nearest the gap.
  Var zp_repr(const ZeroPronoun& zp) {
    const ModelConfig& cfg = mp.cfg;
    const Sentence& sent = doc.sentences[zp.sentence_idx];
    std::vector<Var> before, after;
    for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
      if (sent.tokens[i].is_zp_placeholder()) continue;
      if (i < zp.gap_index)
        before.push_back(embed(sent.tokens[i].form));
      else if (i > zp.gap_index)
        after.push_back(embed(sent.tokens[i].form));
    }
    if (cfg.context_window != -1) {
      std::size_t w = static_cast<std::size_t>(cfg.context_window);
      if (before.size() > w) before.erase(before.begin(), before.end() - static_cast<long>(w));
      if (after.size() > w) after.resize(w);
    }
    Var h_pre = before.empty() ? zero_vec(cfg.zp_hidden)
                               : lstm_run(t, before, pre, false, cfg.zp_hidden).last_hidden;
    Var h_fol = after.empty() ? zero_vec(cfg.zp_hidden)
                              : lstm_run(t, after, fol, true, cfg.zp_hidden).last_hidden;
    switch (cfg.zp_combine) {
      case ZpCombine::concat: return t.concat({h_pre, h_fol});
      case ZpCombine::average: return t.scale(t.add(h_pre, h_fol), 0.5);
      case ZpCombine::sum: return t.add(h_pre, h_fol);
    }
    return t.concat({h_pre, h_fol});
  }

  // head, first, last, two before, two after, plus averages of five before,
  // five after and the span content; absent positions contribute zeros.
  Var local_repr(const NPSpan& np) {
    std::size_t d = mp.cfg.embedding_dim;
    const Sentence& sent = doc.sentences[np.sentence_idx];

    long first_flat = -1, last_flat = -1;
    std::vector<Var> content;
    for (std::size_t i = np.start; i < np.end; ++i) {
      long f = flat.flat_of[np.sentence_idx][i];
      if (f < 0) continue;
      if (first_flat < 0) first_flat = f;
      last_flat = f;
      content.push_back(embed(sent.tokens[i].form));
    }

    std::vector<Var> blocks;
    blocks.push_back(embed(sent.tokens[np.head_index].form));
    blocks.push_back(first_flat >= 0 ? embed_flat(static_cast<std::size_t>(first_flat))
                                     : zero_vec(d));
    blocks.push_back(last_flat >= 0 ? embed_flat(static_cast<std::size_t>(last_flat))
                                    : zero_vec(d));
    for (long off = 1; off <= 2; ++off) {
      long p = first_flat - off;
      blocks.push_back(first_flat >= 0 && p >= 0 ? embed_flat(static_cast<std::size_t>(p))
                                                 : zero_vec(d));
    }
    long n_flat = static_cast<long>(flat.positions.size());
    for (long off = 1; off <= 2; ++off) {
      long p = last_flat + off;
      blocks.push_back(last_flat >= 0 && p < n_flat ? embed_flat(static_cast<std::size_t>(p))
                                                    : zero_vec(d));
    }
    std::vector<Var> prec5, foll5;
    if (first_flat >= 0)
      for (long p = std::max<long>(0, first_flat - 5); p < first_flat; ++p)
        prec5.push_back(embed_flat(static_cast<std::size_t>(p)));
    if (last_flat >= 0)
      for (long p = last_flat + 1; p <= std::min(n_flat - 1, last_flat + 5); ++p)
        foll5.push_back(embed_flat(static_cast<std::size_t>(p)));
    blocks.push_back(average(prec5, d));
    blocks.push_back(average(foll5, d));
    blocks.push_back(average(content, d));

    return mlp_forward(t, t.concat(blocks), mlp);
  }

  std::vector<Var> global_reprs(const std::vector<Var>& locals) {
    LstmRun fwd = lstm_run(t, locals, gfwd, false, mp.cfg.global_hidden);
    LstmRun bwd = lstm_run(t, locals, gbwd, true, mp.cfg.global_hidden);
    std::vector<Var> out;
    out.reserve(locals.size());
    for (std::size_t i = 0; i < locals.size(); ++i)
      out.push_back(t.concat({fwd.all_hidden[i], bwd.all_hidden[i]}));
    return out;
  }

  Var score(Var f_zp, Var l_np, Var g_np, const Tensor& features, Ablation ablation) {
    Var l = ablation == Ablation::global_only ? zero_vec(mp.cfg.local_hidden[2]) : l_np;
    Var g = ablation == Ablation::local_only ? zero_vec(2 * mp.cfg.global_hidden) : g_np;
    Var input = t.concat({f_zp, l, g, t.constant(features)});
    return t.tanh(t.add(t.matvec(w_s, input), b_s));
  }
};

}  // namespace

InstanceGraph build_instance_graph(Tape& t, const ZeroPronoun& zp,
                                   const std::vector<NPSpan>& candidates,
                                   const std::vector<Tensor>& features, const Document& doc,
                                   ModelParams& params, Ablation ablation,
                                   const std::vector<double>* gold) {
  if (candidates.empty())
    throw NoCandidatesError("no candidates for zero pronoun at sentence " +
                            std::to_string(zp.sentence_idx) + ", token " +
                            std::to_string(zp.gap_index));
  if (features.size() != candidates.size())
    throw ShapeError("feature rows (" + std::to_string(features.size()) +
                     ") do not match candidates (" + std::to_string(candidates.size()) + ")");

  Graph g(t, params, doc);
  Var f_zp = g.zp_repr(zp);
  std::vector<Var> locals;
  locals.reserve(candidates.size());
  for (const NPSpan& np : candidates) locals.push_back(g.local_repr(np));
  std::vector<Var> globals = g.global_reprs(locals);

  std::vector<Var> scores;
  scores.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i)
    scores.push_back(g.score(f_zp, locals[i], globals[i], features[i], ablation));

  InstanceGraph out;
  out.probs = t.softmax(t.stack_scalars(scores));
  if (gold) out.loss = t.cross_entropy(out.probs, *gold);
  return out;
}

Tensor encode_zp(const ZeroPronoun& zp, const Document& doc, const ModelConfig& cfg,
                 ModelParams& params) {
  (void)cfg;  // params carries the live config
  Tape t;
  Graph g(t, params, doc);
  return t.value(g.zp_repr(zp));
}

Tensor encode_local(const NPSpan& np, const Document& doc, ModelParams& params) {
  Tape t;
  Graph g(t, params, doc);
  return t.value(g.local_repr(np));
}

std::vector<Tensor> encode_global(const std::vector<Tensor>& locals, ModelParams& params) {
  if (locals.empty()) throw NoCandidatesError("encode_global: empty candidate set");
  Tape t;
  LstmVars fwd = params.global_fwd.bind(t);
  LstmVars bwd = params.global_bwd.bind(t);
  std::vector<Var> vars;
  vars.reserve(locals.size());
  for (const Tensor& l : locals) {
    require_vector_dim(l, params.cfg.local_hidden[2], "encode_global local");
    vars.push_back(t.constant(l));
  }
  LstmRun f = lstm_run(t, vars, fwd, false, params.cfg.global_hidden);
  LstmRun b = lstm_run(t, vars, bwd, true, params.cfg.global_hidden);
  std::vector<Tensor> out;
  out.reserve(locals.size());
  for (std::size_t i = 0; i < locals.size(); ++i)
    out.push_back(t.value(t.concat({f.all_hidden[i], b.all_hidden[i]})));
  return out;
}

ResolveResult resolve(const ZeroPronoun& zp, const std::vector<NPSpan>& candidates,
                      const Document& doc, ModelParams& params, Ablation ablation) {
  std::vector<Tensor> features = features_for_candidates(zp, candidates, doc);
  Tape t;
  InstanceGraph g = build_instance_graph(t, zp, candidates, features, doc, params, ablation,
                                         nullptr);
  ResolveResult r;
  r.probs = t.value(g.probs);
  r.predicted = 0;
  for (std::size_t i = 0; i < r.probs.size(); ++i)
    if (r.probs.data[i] >= r.probs.data[r.predicted]) r.predicted = i;
  return r;
}

namespace {

constexpr char kMagic[8] = {'Z', 'P', 'R', 'E', 'S', 'C', 'K', '1'};

void write_u64(std::ostream& o, std::uint64_t v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_i64(std::ostream& o, std::int64_t v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_string(std::ostream& o, const std::string& s) {
  write_u64(o, s.size());
  o.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint64_t read_u64(std::istream& i, const std::string& path) {
  std::uint64_t v = 0;
  if (!i.read(reinterpret_cast<char*>(&v), sizeof v))
    throw ParseError(path + ": truncated checkpoint");
  return v;
}

std::int64_t read_i64(std::istream& i, const std::string& path) {
  std::int64_t v = 0;
  if (!i.read(reinterpret_cast<char*>(&v), sizeof v))
    throw ParseError(path + ": truncated checkpoint");
  return v;
}

std::string read_string(std::istream& i, const std::string& path) {
  std::uint64_t n = read_u64(i, path);
  std::string s(n, '\0');
  if (!i.read(s.data(), static_cast<std::streamsize>(n)))
    throw ParseError(path + ": truncated checkpoint");
  return s;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& params) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot write checkpoint: " + path);
  f.write(kMagic, sizeof kMagic);
  write_u64(f, 1);  // format version
  write_string(f, kFeatureSchemaVersion);
  const ModelConfig& c = params.cfg;
  write_u64(f, c.embedding_dim);
  write_u64(f, c.zp_hidden);
  write_u64(f, c.local_hidden[0]);
  write_u64(f, c.local_hidden[1]);
  write_u64(f, c.local_hidden[2]);
  write_u64(f, c.global_hidden);
  write_i64(f, c.context_window);
  write_u64(f, c.feature_dim);
  write_string(f, zp_combine_name(c.zp_combine));

  const auto& words = params.emb.words();
  write_u64(f, words.size());
  for (const std::string& w : words) write_string(f, w);

  auto& mutable_params = const_cast<ModelParams&>(params);
  for (Parameter* p : mutable_params.all()) {
    write_u64(f, p->value.shape.size());
    for (std::size_t d : p->value.shape) write_u64(f, d);
    write_u64(f, p->value.data.size());
    f.write(reinterpret_cast<const char*>(p->value.data.data()),
            static_cast<std::streamsize>(p->value.data.size() * sizeof(double)));
  }
  if (!f) throw ParseError("failed writing checkpoint: " + path);
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open checkpoint: " + path);
  char magic[8];
  if (!f.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw ParseError(path + ": not a checkpoint file");
  std::uint64_t version = read_u64(f, path);
  if (version != 1)
    throw ParseError(path + ": unsupported checkpoint version " + std::to_string(version));
  std::string schema = read_string(f, path);
  if (schema != kFeatureSchemaVersion)
    throw ParseError(path + ": feature schema '" + schema + "' does not match '" +
                     kFeatureSchemaVersion + "'");

  ModelConfig c;
  c.embedding_dim = read_u64(f, path);
  c.zp_hidden = read_u64(f, path);
  c.local_hidden[0] = read_u64(f, path);
  c.local_hidden[1] = read_u64(f, path);
  c.local_hidden[2] = read_u64(f, path);
  c.global_hidden = read_u64(f, path);
  c.context_window = static_cast<int>(read_i64(f, path));
  c.feature_dim = read_u64(f, path);
  c.zp_combine = zp_combine_from_name(read_string(f, path));

  std::uint64_t vocab_n = read_u64(f, path);
  std::vector<std::string> words;
  words.reserve(vocab_n);
  for (std::uint64_t i = 0; i < vocab_n; ++i) words.push_back(read_string(f, path));

  ModelParams mp(c, std::move(words));
  for (Parameter* p : mp.all()) {
    std::uint64_t rank = read_u64(f, path);
    std::vector<std::size_t> shape(rank);
    for (std::uint64_t d = 0; d < rank; ++d) shape[d] = read_u64(f, path);
    std::uint64_t count = read_u64(f, path);
    if (shape != p->value.shape || count != p->value.data.size())
      throw ParseError(path + ": tensor " + p->name + " has unexpected shape");
    if (!f.read(reinterpret_cast<char*>(p->value.data.data()),
                static_cast<std::streamsize>(count * sizeof(double))))
      throw ParseError(path + ": truncated checkpoint in " + p->name);
  }
  return mp;
}

}  // namespace zpres
