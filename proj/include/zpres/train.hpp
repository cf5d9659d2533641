#pragma once

#include "zpres/model.hpp"

namespace zpres {

// One anaphoric gap with its ordered candidates, feature rows and gold
// indicator vector.
struct Instance {
  const Document* doc = nullptr;
  ZeroPronoun zp;
  std::vector<NPSpan> candidates;
  std::vector<Tensor> features;
  std::vector<double> gold;

  bool has_gold() const {
    for (double g : gold)
      if (g != 0.0) return true;
    return false;
  }
};

enum class InstanceMode { train, eval };

struct InstanceStats {
  std::size_t anaphoric_zps = 0;
  std::size_t dropped_no_candidates = 0;  // train mode only
  std::size_t dropped_no_gold = 0;        // train mode only
};

// One instance per anaphoric zero pronoun. Train mode drops gaps whose
// candidate window is empty or holds no chain-mate (their loss carries no
// signal); eval mode keeps everything so misses count against recall.
std::vector<Instance> build_instances(const std::vector<Document>& corpus, InstanceMode mode,
                                      InstanceStats* stats = nullptr);

struct Hyperparams {
  double lr = 0.01;
  double init_range = 0.01;
  std::size_t epochs = 10;
  std::uint64_t seed = 1;
  bool shuffle = true;
  bool fine_tune_embeddings = true;
};

struct TrainLog {
  std::vector<double> epoch_mean_loss;
};

// Per-instance SGD (batch size one), instance order reshuffled each epoch
// when hp.shuffle is set. Aborts with NumericError naming the instance if the
// loss goes non-finite.
TrainLog train(const std::vector<Instance>& instances, const Hyperparams& hp,
               ModelParams& params, Ablation ablation = Ablation::full);

struct Counts {
  std::size_t gold = 0;       // anaphoric zero pronouns
  std::size_t attempted = 0;  // with at least one candidate
  std::size_t hits = 0;       // predicted candidate shares the gap's chain
};

struct Metrics {
  Counts overall;
  std::map<Genre, Counts> per_genre;

  static double recall(const Counts& c);
  static double precision(const Counts& c);
  static double f_score(const Counts& c);
  double recall() const { return recall(overall); }
  double precision() const { return precision(overall); }
  double f_score() const { return f_score(overall); }
};

Metrics evaluate(ModelParams& params, const std::vector<Document>& corpus, Ablation ablation);

struct SweepRow {
  int window = -1;
  Metrics metrics;
};

// Trains one fresh model per window value (same seed throughout) and
// evaluates it.
std::vector<SweepRow> window_sweep(const std::vector<Document>& train_corpus,
                                   const std::vector<Document>& eval_corpus,
                                   const ModelConfig& cfg, const Hyperparams& hp,
                                   const std::vector<int>& windows);

struct AblationRow {
  Ablation mode = Ablation::full;
  Metrics metrics;
};

// Retrains per mode: full, global_only, local_only.
std::vector<AblationRow> ablation_sweep(const std::vector<Document>& train_corpus,
                                        const std::vector<Document>& eval_corpus,
                                        const ModelConfig& cfg, const Hyperparams& hp);

// Report text, percentages with one decimal.
std::string metrics_csv(const Metrics& m, Ablation ablation);
std::string loss_log_csv(const TrainLog& log);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string ablation_csv(const std::vector<AblationRow>& rows);

}  // namespace zpres
