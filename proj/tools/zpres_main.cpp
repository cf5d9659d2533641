// Command-line front end: train, eval, ablate, sweep, gradcheck, gen-corpus.
// Exit codes: 0 success, 1 check failure, 2 usage/config error, 3 numeric
// failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "zpres/config.hpp"
#include "zpres/error.hpp"

namespace fs = std::filesystem;
using namespace zpres;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

constexpr double kGradCheckTolerance = 1e-4;

void require_input(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " path is required");
  if (!fs::exists(path)) throw ConfigError(what + " path does not exist: " + path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write: " + path);
  f << text;
}

std::vector<Document> load_corpus(const std::string& path, const std::string& what) {
  require_input(path, what);
  return parse_conll(path);
}

ModelParams initial_params(const RunConfig& rc, const std::vector<Document>& train_docs) {
  ModelConfig cfg = rc.model_config();
  Hyperparams hp = rc.hyperparams();
  if (!rc.embeddings.empty()) {
    require_input(rc.embeddings, "embeddings");
    Embeddings loaded = Embeddings::load(rc.embeddings, cfg.embedding_dim);
    return init_params(cfg, loaded, hp.init_range, hp.seed);
  }
  return init_params(cfg, collect_vocab(train_docs), hp.init_range, hp.seed);
}

int cmd_train(const RunConfig& rc) {
  if (rc.checkpoint.empty()) throw ConfigError("checkpoint path is required");
  std::vector<Document> docs = load_corpus(rc.corpus, "corpus");
  ModelParams params = initial_params(rc, docs);
  Hyperparams hp = rc.hyperparams();

  InstanceStats stats;
  std::vector<Instance> instances = build_instances(docs, InstanceMode::train, &stats);
  std::cerr << "train: " << stats.anaphoric_zps << " anaphoric gaps, "
            << stats.dropped_no_candidates << " dropped without candidates, "
            << stats.dropped_no_gold << " dropped without reachable gold\n";

  TrainLog log = train(instances, hp, params, rc.ablation.value_or(Ablation::full));
  save_checkpoint(rc.checkpoint, params);
  if (!rc.loss_log.empty()) write_text(rc.loss_log, loss_log_csv(log));
  std::cout << "trained " << instances.size() << " instances for " << hp.epochs
            << " epochs; final mean loss "
            << (log.epoch_mean_loss.empty() ? 0.0 : log.epoch_mean_loss.back()) << "\n";
  std::cout << "checkpoint written to " << rc.checkpoint << "\n";
  return kExitOk;
}

int cmd_eval(const RunConfig& rc) {
  require_input(rc.checkpoint, "checkpoint");
  ModelParams params = load_checkpoint(rc.checkpoint);
  rc.check_against(params.cfg);
  if (rc.context_window) params.cfg.context_window = *rc.context_window;

  std::string corpus_path = rc.eval_corpus.empty() ? rc.corpus : rc.eval_corpus;
  std::vector<Document> docs = load_corpus(corpus_path, "eval corpus");
  Ablation mode = rc.ablation.value_or(Ablation::full);
  Metrics m = evaluate(params, docs, mode);
  std::string csv = metrics_csv(m, mode);
  if (!rc.report.empty()) write_text(rc.report, csv);
  std::printf("Overall R=%.1f P=%.1f F=%.1f (%s)\n", 100.0 * m.recall(), 100.0 * m.precision(),
              100.0 * m.f_score(), ablation_name(mode));
  return kExitOk;
}

int cmd_ablate(const RunConfig& rc) {
  std::vector<Document> train_docs = load_corpus(rc.corpus, "corpus");
  std::vector<Document> eval_docs = load_corpus(rc.eval_corpus, "eval corpus");
  auto rows = ablation_sweep(train_docs, eval_docs, rc.model_config(), rc.hyperparams());
  std::string csv = ablation_csv(rows);
  if (!rc.report.empty()) write_text(rc.report, csv);
  std::cout << csv;
  return kExitOk;
}

int cmd_sweep(const RunConfig& rc) {
  if (rc.windows.empty()) throw ConfigError("windows list is required (e.g. --windows 1,2,all)");
  std::vector<Document> train_docs = load_corpus(rc.corpus, "corpus");
  std::vector<Document> eval_docs = load_corpus(rc.eval_corpus, "eval corpus");
  auto rows = window_sweep(train_docs, eval_docs, rc.model_config(), rc.hyperparams(),
                           rc.windows);
  std::string csv = sweep_csv(rows);
  if (!rc.report.empty()) write_text(rc.report, csv);
  std::cout << csv;
  return kExitOk;
}

// Self-contained check on a fresh synthetic instance: analytic gradients of
// the full model against central finite differences.
int cmd_gradcheck(const RunConfig& rc, bool corrupt) {
  std::uint64_t seed = rc.seed.value_or(7);

  SyntheticSpec spec;
  spec.n_docs = 1;
  spec.sentences_per_doc = 6;
  std::vector<Document> docs = generate_synthetic(seed, spec);
  std::vector<Instance> instances = build_instances(docs, InstanceMode::train);
  const Instance* pick = nullptr;
  for (const Instance& inst : instances)
    if (inst.candidates.size() == 3) pick = &inst;
  if (!pick) throw ConfigError("gradcheck: no 3-candidate instance in the probe corpus");

  ModelConfig cfg;
  cfg.embedding_dim = 20;
  cfg.zp_hidden = 12;
  cfg.local_hidden = {40, 24, 16};
  cfg.global_hidden = 12;
  // moderate init keeps ReLU kinks away from the finite-difference stencil
  ModelParams params = init_params(cfg, collect_vocab(docs), 0.2, seed);

  auto closure = [&](Tape& t) {
    return build_instance_graph(t, pick->zp, pick->candidates, pick->features, *pick->doc,
                                params, Ablation::full, &pick->gold)
        .loss;
  };
  std::function<void()> hook;
  if (corrupt) hook = [&]() { params.scorer_b.grad.data[0] += 1.0; };

  GradCheckResult res = grad_check(params.all(), closure, 1e-5, 48, seed, hook);
  std::printf("max relative error %.3e (worst: %s)\n", res.max_rel_error,
              res.worst_param.c_str());
  if (res.max_rel_error < kGradCheckTolerance) return kExitOk;
  std::cout << "gradient check failed: tolerance " << kGradCheckTolerance << " exceeded\n";
  return kExitCheckFailed;
}

int cmd_gen_corpus(const RunConfig& rc) {
  if (rc.out.empty()) throw ConfigError("output path (--out) is required");
  SyntheticSpec spec = rc.synthetic_spec();
  std::vector<Document> docs = generate_synthetic(rc.seed.value_or(1), spec);
  write_conll(rc.out, docs);
  std::size_t zps = 0;
  for (const Document& d : docs) zps += d.zps.size();
  std::cout << "wrote " << docs.size() << " documents, " << zps << " zero pronouns to " << rc.out
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zero pronoun resolver"};
  app.require_subcommand(1);

  std::string config_path;
  RunConfig overrides;
  bool corrupt = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value config file");
    sub->add_option_function<std::string>(
        "--seed", [&](const std::string& v) { overrides.set("seed", v); });
    sub->add_option_function<std::string>(
        "--corpus", [&](const std::string& v) { overrides.set("corpus", v); });
    sub->add_option_function<std::string>(
        "--eval-corpus", [&](const std::string& v) { overrides.set("eval_corpus", v); });
    sub->add_option_function<std::string>(
        "--embeddings", [&](const std::string& v) { overrides.set("embeddings", v); });
    sub->add_option_function<std::string>(
        "--checkpoint", [&](const std::string& v) { overrides.set("checkpoint", v); });
    sub->add_option_function<std::string>(
        "--report", [&](const std::string& v) { overrides.set("report", v); });
    sub->add_option_function<std::string>(
        "--loss-log", [&](const std::string& v) { overrides.set("loss_log", v); });
    sub->add_option_function<std::string>(
        "--window", [&](const std::string& v) { overrides.set("context_window", v); });
    sub->add_option_function<std::string>(
        "--windows", [&](const std::string& v) { overrides.set("windows", v); });
    sub->add_option_function<std::string>(
        "--ablation", [&](const std::string& v) { overrides.set("ablation", v); });
    sub->add_option_function<std::string>(
        "--epochs", [&](const std::string& v) { overrides.set("epochs", v); });
    sub->add_option_function<std::string>(
        "--lr", [&](const std::string& v) { overrides.set("lr", v); });
    sub->add_option_function<std::string>(
        "--init-range", [&](const std::string& v) { overrides.set("init_range", v); });
  };

  CLI::App* train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint, report R/P/F");
  CLI::App* ablate_cmd =
      app.add_subcommand("ablate", "retrain with full/global_only/local_only scoring inputs");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "retrain across context window sizes");
  CLI::App* gradcheck_cmd =
      app.add_subcommand("gradcheck", "finite-difference check of model gradients");
  CLI::App* gen_cmd = app.add_subcommand("gen-corpus", "write a synthetic corpus");
  for (CLI::App* sub : {train_cmd, eval_cmd, ablate_cmd, sweep_cmd, gradcheck_cmd, gen_cmd})
    add_common(sub);

  gradcheck_cmd->add_flag("--self-test-corrupt", corrupt,
                          "corrupt one gradient to confirm the check detects it");
  gen_cmd->add_option_function<std::string>(
      "--out", [&](const std::string& v) { overrides.set("out", v); });
  gen_cmd->add_option_function<std::string>(
      "--n-docs", [&](const std::string& v) { overrides.set("n_docs", v); });
  gen_cmd->add_option_function<std::string>(
      "--sentences-per-doc",
      [&](const std::string& v) { overrides.set("sentences_per_doc", v); });
  gen_cmd->add_option_function<std::string>(
      "--vocab-size", [&](const std::string& v) { overrides.set("vocab_size", v); });
  gen_cmd->add_option_function<std::string>(
      "--distractor-mode", [&](const std::string& v) { overrides.set("distractor_mode", v); });

  RunConfig rc;
  try {
    app.parse(argc, argv);
    // file first, then flag overrides on top
    if (!config_path.empty()) rc.merge_file(config_path);
    RunConfig merged = overrides;
    std::swap(rc, merged);
    // rc currently holds overrides; re-apply: file values fill unset fields
    rc = merged;
    if (!config_path.empty()) {
      RunConfig from_file;
      from_file.merge_file(config_path);
      // overrides win where set
      auto keep = rc;
      rc = from_file;
      if (!keep.corpus.empty()) rc.corpus = keep.corpus;
      if (!keep.eval_corpus.empty()) rc.eval_corpus = keep.eval_corpus;
      if (!keep.embeddings.empty()) rc.embeddings = keep.embeddings;
      if (!keep.checkpoint.empty()) rc.checkpoint = keep.checkpoint;
      if (!keep.report.empty()) rc.report = keep.report;
      if (!keep.loss_log.empty()) rc.loss_log = keep.loss_log;
      if (!keep.out.empty()) rc.out = keep.out;
      if (keep.embedding_dim) rc.embedding_dim = keep.embedding_dim;
      if (keep.zp_hidden) rc.zp_hidden = keep.zp_hidden;
      if (keep.local_hidden) rc.local_hidden = keep.local_hidden;
      if (keep.global_hidden) rc.global_hidden = keep.global_hidden;
      if (keep.context_window) rc.context_window = keep.context_window;
      if (keep.zp_combine) rc.zp_combine = keep.zp_combine;
      if (keep.lr) rc.lr = keep.lr;
      if (keep.init_range) rc.init_range = keep.init_range;
      if (keep.epochs) rc.epochs = keep.epochs;
      if (keep.seed) rc.seed = keep.seed;
      if (keep.shuffle) rc.shuffle = keep.shuffle;
      if (keep.fine_tune_embeddings) rc.fine_tune_embeddings = keep.fine_tune_embeddings;
      if (keep.ablation) rc.ablation = keep.ablation;
      if (!keep.windows.empty()) rc.windows = keep.windows;
      if (keep.n_docs) rc.n_docs = keep.n_docs;
      if (keep.sentences_per_doc) rc.sentences_per_doc = keep.sentences_per_doc;
      if (keep.vocab_size) rc.vocab_size = keep.vocab_size;
      if (keep.distractor_mode) rc.distractor_mode = keep.distractor_mode;
    }

    if (train_cmd->parsed()) return cmd_train(rc);
    if (eval_cmd->parsed()) return cmd_eval(rc);
    if (ablate_cmd->parsed()) return cmd_ablate(rc);
    if (sweep_cmd->parsed()) return cmd_sweep(rc);
    if (gradcheck_cmd->parsed()) return cmd_gradcheck(rc, corrupt);
    if (gen_cmd->parsed()) return cmd_gen_corpus(rc);
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
