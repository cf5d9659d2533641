#include "zpres/config.hpp"

#include <fstream>
#include <sstream>

#include "zpres/error.hpp"

namespace zpres {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": bad numeric value '" + value + "'");
  }
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": bad count '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key + ": bad boolean '" + value + "'");
}

}  // namespace

int parse_window_value(const std::string& text) {
  if (text == "all" || text == "inf" || text == "-1") return -1;
  int v = static_cast<int>(parse_count("context_window", text));
  if (v < 1) throw ConfigError("context_window must be positive or 'all'");
  return v;
}

std::vector<int> parse_window_list(const std::string& text) {
  std::vector<int> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_window_value(item));
  }
  if (out.empty()) throw ConfigError("windows: empty list '" + text + "'");
  return out;
}

void RunConfig::merge_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + " line " + std::to_string(line_no) + ": expected key=value");
    try {
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(path + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "corpus") corpus = value;
  else if (key == "eval_corpus") eval_corpus = value;
  else if (key == "embeddings") embeddings = value;
  else if (key == "checkpoint") checkpoint = value;
  else if (key == "report") report = value;
  else if (key == "loss_log") loss_log = value;
  else if (key == "out") out = value;
  else if (key == "embedding_dim") embedding_dim = parse_count(key, value);
  else if (key == "zp_hidden") zp_hidden = parse_count(key, value);
  else if (key == "global_hidden") global_hidden = parse_count(key, value);
  else if (key == "local_hidden") {
    std::array<std::size_t, 3> dims{};
    std::istringstream is(value);
    std::string item;
    std::size_t i = 0;
    while (std::getline(is, item, ',')) {
      if (i >= 3) throw ConfigError("local_hidden: expected three sizes, got '" + value + "'");
      dims[i++] = parse_count(key, trim(item));
    }
    if (i != 3) throw ConfigError("local_hidden: expected three sizes, got '" + value + "'");
    local_hidden = dims;
  } else if (key == "context_window") {
    context_window = parse_window_value(value);
  } else if (key == "zp_combine") {
    zp_combine = zp_combine_from_name(value);
  } else if (key == "lr") {
    lr = parse_double(key, value);
    if (*lr <= 0.0) throw ConfigError("lr must be positive");
  } else if (key == "init_range") {
    init_range = parse_double(key, value);
    if (*init_range <= 0.0) throw ConfigError("init_range must be positive");
  } else if (key == "epochs") {
    epochs = parse_count(key, value);
  } else if (key == "seed") {
    seed = parse_count(key, value);
  } else if (key == "shuffle") {
    shuffle = parse_bool(key, value);
  } else if (key == "fine_tune_embeddings") {
    fine_tune_embeddings = parse_bool(key, value);
  } else if (key == "ablation") {
    ablation = ablation_from_name(value);
  } else if (key == "windows") {
    windows = parse_window_list(value);
  } else if (key == "n_docs") {
    n_docs = parse_count(key, value);
  } else if (key == "sentences_per_doc") {
    sentences_per_doc = parse_count(key, value);
  } else if (key == "vocab_size") {
    vocab_size = parse_count(key, value);
  } else if (key == "distractor_mode") {
    distractor_mode = distractor_mode_from_name(value);
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

ModelConfig RunConfig::model_config() const {
  ModelConfig cfg;
  if (embedding_dim) cfg.embedding_dim = *embedding_dim;
  if (zp_hidden) cfg.zp_hidden = *zp_hidden;
  if (local_hidden) cfg.local_hidden = *local_hidden;
  if (global_hidden) cfg.global_hidden = *global_hidden;
  if (context_window) cfg.context_window = *context_window;
  if (zp_combine) cfg.zp_combine = *zp_combine;
  cfg.validate();
  return cfg;
}

Hyperparams RunConfig::hyperparams() const {
  Hyperparams hp;
  if (lr) hp.lr = *lr;
  if (init_range) hp.init_range = *init_range;
  if (epochs) hp.epochs = *epochs;
  if (seed) hp.seed = *seed;
  if (shuffle) hp.shuffle = *shuffle;
  if (fine_tune_embeddings) hp.fine_tune_embeddings = *fine_tune_embeddings;
  return hp;
}

SyntheticSpec RunConfig::synthetic_spec() const {
  SyntheticSpec spec;
  if (n_docs) spec.n_docs = *n_docs;
  if (sentences_per_doc) spec.sentences_per_doc = *sentences_per_doc;
  if (vocab_size) spec.vocab_size = *vocab_size;
  if (distractor_mode) spec.distractor_mode = *distractor_mode;
  return spec;
}

void RunConfig::check_against(const ModelConfig& loaded) const {
  auto mismatch = [](const std::string& what) {
    throw ConfigError("checkpoint does not match requested " + what);
  };
  if (embedding_dim && *embedding_dim != loaded.embedding_dim) mismatch("embedding_dim");
  if (zp_hidden && *zp_hidden != loaded.zp_hidden) mismatch("zp_hidden");
  if (local_hidden && *local_hidden != loaded.local_hidden) mismatch("local_hidden");
  if (global_hidden && *global_hidden != loaded.global_hidden) mismatch("global_hidden");
  if (zp_combine && *zp_combine != loaded.zp_combine) mismatch("zp_combine");
}

}  // namespace zpres
