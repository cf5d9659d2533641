#pragma once

#include <array>

#include "zpres/candidates.hpp"
#include "zpres/corpus.hpp"
#include "zpres/embedding.hpp"
#include "zpres/nn.hpp"

namespace zpres {

enum class Ablation { full, local_only, global_only };
const char* ablation_name(Ablation a);
Ablation ablation_from_name(const std::string& name);

// How the two context LSTMs' final states are merged into the gap
// representation.
enum class ZpCombine { concat, average, sum };
const char* zp_combine_name(ZpCombine c);
ZpCombine zp_combine_from_name(const std::string& name);

struct ModelConfig {
  std::size_t embedding_dim = 100;
  std::size_t zp_hidden = 100;
  std::array<std::size_t, 3> local_hidden{300, 200, 100};
  std::size_t global_hidden = 100;
  int context_window = -1;  // words kept on each side of the gap; -1 = all
  std::size_t feature_dim = kFeatureDim;
  ZpCombine zp_combine = ZpCombine::concat;

  std::size_t zp_repr_dim() const {
    return zp_combine == ZpCombine::concat ? 2 * zp_hidden : zp_hidden;
  }
  std::size_t local_input_dim() const { return 10 * embedding_dim; }
  std::size_t scorer_input_dim() const {
    return zp_repr_dim() + local_hidden[2] + 2 * global_hidden + feature_dim;
  }
  void validate() const;  // throws ConfigError
};

struct ModelParams {
  ModelConfig cfg;
  Embeddings emb;
  LstmParams lstm_pre, lstm_fol;
  MlpParams local_mlp;
  LstmParams global_fwd, global_bwd;
  Parameter scorer_w;  // 1 x scorer_input_dim, so scores are scalar
  Parameter scorer_b;

  ModelParams(ModelConfig cfg, std::vector<std::string> vocab);

  // Declared order; also the checkpoint tensor order.
  std::vector<Parameter*> all();
  std::vector<Parameter*> trainable(bool fine_tune_embeddings);
};

ModelParams init_params(const ModelConfig& cfg, std::vector<std::string> vocab,
                        double init_range, std::uint64_t seed);
// Vocabulary and embedding columns come from the file; the unk column keeps
// its random initialization.
ModelParams init_params(const ModelConfig& cfg, const Embeddings& pretrained, double init_range,
                        std::uint64_t seed);

// Tape-level forward pass for one gap and its candidate list. probs is the
// softmax over candidate scores; loss is only built when gold is non-null.
struct InstanceGraph {
  Var probs;
  Var loss;
};
InstanceGraph build_instance_graph(Tape& t, const ZeroPronoun& zp,
                                   const std::vector<NPSpan>& candidates,
                                   const std::vector<Tensor>& features, const Document& doc,
                                   ModelParams& params, Ablation ablation,
                                   const std::vector<double>* gold);

// Forward-only encoder entry points.
Tensor encode_zp(const ZeroPronoun& zp, const Document& doc, const ModelConfig& cfg,
                 ModelParams& params);
Tensor encode_local(const NPSpan& np, const Document& doc, ModelParams& params);
std::vector<Tensor> encode_global(const std::vector<Tensor>& locals, ModelParams& params);

struct ResolveResult {
  Tensor probs;
  std::size_t predicted = 0;  // index into the candidate list
};

// Scores every candidate and predicts the most probable one; exact ties go to
// the textually nearest (highest-index) candidate. Rejects an empty list.
ResolveResult resolve(const ZeroPronoun& zp, const std::vector<NPSpan>& candidates,
                      const Document& doc, ModelParams& params, Ablation ablation);

void save_checkpoint(const std::string& path, const ModelParams& params);
ModelParams load_checkpoint(const std::string& path);

}  // namespace zpres
