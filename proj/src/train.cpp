#include "zpres/train.hpp"

#include <cstdio>
#include <numeric>
#include <sstream>

#include "zpres/error.hpp"

namespace zpres {

std::vector<Instance> build_instances(const std::vector<Document>& corpus, InstanceMode mode,
                                      InstanceStats* stats) {
  InstanceStats local;
  std::vector<Instance> out;
  for (const Document& doc : corpus) {
    for (const ZeroPronoun& zp : doc.zps) {
      if (!doc.anaphoric(zp)) continue;
      ++local.anaphoric_zps;
      Instance inst;
      inst.doc = &doc;
      inst.zp = zp;
      inst.candidates = extract_candidates(zp, doc);
      inst.features = features_for_candidates(zp, inst.candidates, doc);
      inst.gold.reserve(inst.candidates.size());
      for (const NPSpan& np : inst.candidates)
        inst.gold.push_back(static_cast<double>(label(zp, np)));
      if (mode == InstanceMode::train) {
        if (inst.candidates.empty()) {
          ++local.dropped_no_candidates;
          continue;
        }
        if (!inst.has_gold()) {
          ++local.dropped_no_gold;
          continue;
        }
      }
      out.push_back(std::move(inst));
    }
  }
  if (stats) *stats = local;
  return out;
}

TrainLog train(const std::vector<Instance>& instances, const Hyperparams& hp,
               ModelParams& params, Ablation ablation) {
  if (instances.empty()) throw ConfigError("train: no instances");
  std::vector<Parameter*> trainable = params.trainable(hp.fine_tune_embeddings);
  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(hp.seed);

  TrainLog log;
  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    if (hp.shuffle) shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      const Instance& inst = instances[idx];
      zero_grads(trainable);
      Tape t;
      InstanceGraph g = build_instance_graph(t, inst.zp, inst.candidates, inst.features,
                                             *inst.doc, params, ablation, &inst.gold);
      try {
        t.backward(g.loss);
      } catch (const NumericError&) {
        throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch + 1) +
                           ", instance " + std::to_string(idx) + " (doc " + inst.doc->id + ")");
      }
      loss_sum += t.value(g.loss).data[0];
      sgd_step(trainable, hp.lr);
    }
    log.epoch_mean_loss.push_back(loss_sum / static_cast<double>(instances.size()));
  }
  return log;
}

double Metrics::recall(const Counts& c) {
  return c.gold == 0 ? 0.0 : static_cast<double>(c.hits) / static_cast<double>(c.gold);
}

double Metrics::precision(const Counts& c) {
  return c.attempted == 0 ? 0.0 : static_cast<double>(c.hits) / static_cast<double>(c.attempted);
}

double Metrics::f_score(const Counts& c) {
  double r = recall(c), p = precision(c);
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

Metrics evaluate(ModelParams& params, const std::vector<Document>& corpus, Ablation ablation) {
  std::vector<Instance> instances = build_instances(corpus, InstanceMode::eval);
  Metrics m;
  for (const Instance& inst : instances) {
    Counts& genre = m.per_genre[inst.doc->genre];
    ++m.overall.gold;
    ++genre.gold;
    if (inst.candidates.empty()) continue;
    ++m.overall.attempted;
    ++genre.attempted;
    ResolveResult r = resolve(inst.zp, inst.candidates, *inst.doc, params, ablation);
    if (label(inst.zp, inst.candidates[r.predicted]) == 1) {
      ++m.overall.hits;
      ++genre.hits;
    }
  }
  return m;
}

std::vector<SweepRow> window_sweep(const std::vector<Document>& train_corpus,
                                   const std::vector<Document>& eval_corpus,
                                   const ModelConfig& cfg, const Hyperparams& hp,
                                   const std::vector<int>& windows) {
  if (windows.empty()) throw ConfigError("window_sweep: empty window list");
  std::vector<Instance> instances = build_instances(train_corpus, InstanceMode::train);
  std::vector<SweepRow> rows;
  for (int w : windows) {
    ModelConfig wcfg = cfg;
    wcfg.context_window = w;
    ModelParams params = init_params(wcfg, collect_vocab(train_corpus), hp.init_range, hp.seed);
    train(instances, hp, params);
    rows.push_back(SweepRow{w, evaluate(params, eval_corpus, Ablation::full)});
  }
  return rows;
}

std::vector<AblationRow> ablation_sweep(const std::vector<Document>& train_corpus,
                                        const std::vector<Document>& eval_corpus,
                                        const ModelConfig& cfg, const Hyperparams& hp) {
  std::vector<Instance> instances = build_instances(train_corpus, InstanceMode::train);
  std::vector<AblationRow> rows;
  for (Ablation mode : {Ablation::full, Ablation::global_only, Ablation::local_only}) {
    ModelParams params = init_params(cfg, collect_vocab(train_corpus), hp.init_range, hp.seed);
    train(instances, hp, params, mode);
    rows.push_back(AblationRow{mode, evaluate(params, eval_corpus, mode)});
  }
  return rows;
}

namespace {

const Genre kGenreOrder[] = {Genre::NW, Genre::MZ, Genre::WB, Genre::BN,
                             Genre::BC, Genre::TC, Genre::SYN};

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  return buf;
}

std::string metric_row(const std::string& name, const Counts& c) {
  return name + "," + pct(Metrics::recall(c)) + "," + pct(Metrics::precision(c)) + "," +
         pct(Metrics::f_score(c)) + "\n";
}

}  // namespace

std::string metrics_csv(const Metrics& m, Ablation ablation) {
  std::string out = "# ablation=" + std::string(ablation_name(ablation)) + "\n";
  out += "scope,R,P,F\n";
  out += metric_row("Overall", m.overall);
  for (Genre g : kGenreOrder) {
    auto it = m.per_genre.find(g);
    if (it != m.per_genre.end()) out += metric_row(genre_name(g), it->second);
  }
  return out;
}

std::string loss_log_csv(const TrainLog& log) {
  std::string out = "epoch,mean_loss\n";
  for (std::size_t i = 0; i < log.epoch_mean_loss.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu,%.6f\n", i + 1, log.epoch_mean_loss[i]);
    out += buf;
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "window,R,P,F\n";
  for (const SweepRow& r : rows) {
    out += (r.window == -1 ? std::string("all") : std::to_string(r.window)) + "," +
           pct(r.metrics.recall()) + "," + pct(r.metrics.precision()) + "," +
           pct(r.metrics.f_score()) + "\n";
  }
  return out;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::string out = "mode,R,P,F\n";
  for (const AblationRow& r : rows)
    out += metric_row(ablation_name(r.mode), r.metrics);
  return out;
}

}  // namespace zpres
