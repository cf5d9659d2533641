#pragma once

#include <optional>

#include "zpres/model.hpp"
#include "zpres/synthetic.hpp"
#include "zpres/train.hpp"

namespace zpres {

// Run settings from a flat key=value file plus command-line overrides. Model
// fields stay unset unless given so a checkpoint's own configuration can be
// checked against explicit requests.
struct RunConfig {
  std::string corpus;
  std::string eval_corpus;
  std::string embeddings;
  std::string checkpoint;
  std::string report;
  std::string loss_log;
  std::string out;

  std::optional<std::size_t> embedding_dim;
  std::optional<std::size_t> zp_hidden;
  std::optional<std::array<std::size_t, 3>> local_hidden;
  std::optional<std::size_t> global_hidden;
  std::optional<int> context_window;  // -1 = all
  std::optional<ZpCombine> zp_combine;

  std::optional<double> lr;
  std::optional<double> init_range;
  std::optional<std::size_t> epochs;
  std::optional<std::uint64_t> seed;
  std::optional<bool> shuffle;
  std::optional<bool> fine_tune_embeddings;

  std::optional<Ablation> ablation;
  std::vector<int> windows;

  std::optional<std::size_t> n_docs;
  std::optional<std::size_t> sentences_per_doc;
  std::optional<std::size_t> vocab_size;
  std::optional<DistractorMode> distractor_mode;

  // key=value lines; '#' starts a comment; unknown keys are errors
  void merge_file(const std::string& path);
  void set(const std::string& key, const std::string& value);

  ModelConfig model_config() const;  // defaults where unset
  Hyperparams hyperparams() const;
  SyntheticSpec synthetic_spec() const;

  // ConfigError when an explicitly requested model field disagrees with a
  // loaded checkpoint's configuration.
  void check_against(const ModelConfig& loaded) const;
};

int parse_window_value(const std::string& text);  // "all"/"inf" -> -1
std::vector<int> parse_window_list(const std::string& text);

}  // namespace zpres
