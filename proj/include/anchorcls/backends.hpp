#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "anchorcls/errors.hpp"

namespace anchorcls {

using json = nlohmann::json;

struct PairDataset;  // defined in reframing.hpp

/// Decoding controls for the text generator.
struct SamplingParams {
  double top_p = 0.9;
  int top_k = 40;
  int max_new_tokens = 100;
  double temperature = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("top_p must be in (0, 1]");
    if (top_k < 1) throw ConfigError("top_k must be >= 1");
    if (max_new_tokens < 1) throw ConfigError("max_new_tokens must be >= 1");
    if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
  }

  json to_json() const {
    return {{"top_p", top_p},
            {"top_k", top_k},
            {"max_new_tokens", max_new_tokens},
            {"temperature", temperature},
            {"seed", seed}};
  }
};

/// Fixed-dimension sentence embedding.
struct Embedding {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }

  void validate() const {
    for (double v : values)
      if (!std::isfinite(v)) throw BackendError("embedding contains a non-finite entry");
  }
};

/// Normalized two-way output of the pair scorer. score() is the scalar
/// similarity used by both prediction rules.
struct SimilarityVector {
  double v0 = 0.5;
  double v1 = 0.5;

  double score() const { return v0 - v1; }

  void validate() const {
    if (!(v0 >= 0.0) || !(v1 >= 0.0) || std::abs(v0 + v1 - 1.0) > 1e-6)
      throw BackendError("similarity vector violates normalization: [" + std::to_string(v0) +
                         ", " + std::to_string(v1) + "]");
  }
};

enum class LossMode { forward_kl, cross_entropy };

inline LossMode loss_mode_from_string(const std::string& s) {
  if (s == "forward_kl") return LossMode::forward_kl;
  if (s == "cross_entropy") return LossMode::cross_entropy;
  throw ConfigError("unknown loss mode '" + s + "' (expected forward_kl or cross_entropy)");
}

inline std::string to_string(LossMode m) {
  return m == LossMode::forward_kl ? "forward_kl" : "cross_entropy";
}

/// Scorer fine-tuning settings. learning_rate == 0 is accepted and leaves
/// parameters untouched (useful for ablations); pipeline-level validation
/// requires a positive rate.
struct TrainConfig {
  double learning_rate = 2e-5;
  double weight_decay = 0.01;
  double warmup_proportion = 0.1;
  int max_epochs = 50;
  int early_stop_patience = 3;
  int batch_size = 32;
  std::uint64_t seed = 0;
  LossMode loss = LossMode::forward_kl;

  void validate() const {
    if (!(learning_rate >= 0.0)) throw ConfigError("learning_rate must be >= 0");
    if (weight_decay < 0.0) throw ConfigError("weight_decay must be >= 0");
    if (warmup_proportion < 0.0 || warmup_proportion > 1.0)
      throw ConfigError("warmup_proportion must be in [0, 1]");
    if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
    if (early_stop_patience < 1) throw ConfigError("early_stop_patience must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  }

  json to_json() const {
    return {{"learning_rate", learning_rate},
            {"weight_decay", weight_decay},
            {"warmup_proportion", warmup_proportion},
            {"max_epochs", max_epochs},
            {"early_stop_patience", early_stop_patience},
            {"batch_size", batch_size},
            {"seed", seed},
            {"loss", to_string(loss)}};
  }
};

struct TrainReport {
  std::vector<double> epoch_loss;
  std::vector<double> epoch_val_accuracy;
  std::string stop_reason;  // "early_stop" | "max_epochs"
  int epochs_run = 0;
  std::uint64_t seed = 0;

  json to_json() const {
    return {{"epoch_loss", epoch_loss},
            {"epoch_val_accuracy", epoch_val_accuracy},
            {"stop_reason", stop_reason},
            {"epochs_run", epochs_run},
            {"seed", seed}};
  }

  static TrainReport from_json(const json& j) {
    TrainReport r;
    r.epoch_loss = j.at("epoch_loss").get<std::vector<double>>();
    r.epoch_val_accuracy = j.at("epoch_val_accuracy").get<std::vector<double>>();
    r.stop_reason = j.at("stop_reason").get<std::string>();
    r.epochs_run = j.at("epochs_run").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
  }
};

struct EmbedStats {
  std::size_t truncated = 0;
};

/// Autoregressive continuation backend. Implementations must be
/// deterministic given (instruction, params.seed) when they claim to be.
class TextGenerator {
 public:
  virtual ~TextGenerator() = default;

  /// Returns the raw continuation (instruction excluded), at most
  /// params.max_new_tokens tokens long under this backend's tokenizer.
  std::string continue_text(const std::string& instruction, const SamplingParams& params) const {
    if (instruction.empty()) throw ConfigError("instruction must be non-empty");
    params.validate();
    if (count_tokens(instruction) + params.max_new_tokens > context_limit())
      throw BackendError("context length exceeded: instruction plus max_new_tokens overflows the " +
                         std::to_string(context_limit()) + "-token limit of " + id());
    return generate(instruction, params);
  }

  virtual int count_tokens(const std::string& text) const = 0;
  virtual int context_limit() const = 0;
  virtual bool supports_concurrent_inference() const { return false; }
  virtual std::string id() const = 0;

 protected:
  virtual std::string generate(const std::string& instruction,
                               const SamplingParams& params) const = 0;
};

/// Sentence embedding backend; embed is a pure function of the input texts
/// for a fixed instance.
class TextEncoder {
 public:
  virtual ~TextEncoder() = default;

  std::vector<Embedding> embed(const std::vector<std::string>& texts,
                               EmbedStats* stats = nullptr) const {
    if (texts.empty()) return {};
    auto out = do_embed(texts, stats);
    if (out.size() != texts.size())
      throw BackendError("encoder returned " + std::to_string(out.size()) + " embeddings for " +
                         std::to_string(texts.size()) + " texts");
    for (const auto& e : out) {
      if (e.dim() != dim())
        throw BackendError("encoder emitted dimension " + std::to_string(e.dim()) +
                           ", expected " + std::to_string(dim()));
      e.validate();
    }
    return out;
  }

  virtual std::size_t dim() const = 0;
  virtual bool supports_concurrent_inference() const { return false; }
  virtual std::string id() const = 0;

 protected:
  virtual std::vector<Embedding> do_embed(const std::vector<std::string>& texts,
                                          EmbedStats* stats) const = 0;
};

/// Binary pair classifier. The input pair is ordered; no symmetry is
/// guaranteed between (a,b) and (b,a). The normalization invariant of the
/// output is enforced here, at the interface boundary.
class PairScorer {
 public:
  virtual ~PairScorer() = default;

  SimilarityVector score(const std::string& text_a, const std::string& text_b) const {
    if (trainable() && !trained())
      throw BackendError("pair scorer '" + id() + "' must be trained before scoring");
    SimilarityVector v = do_score(text_a, text_b);
    v.validate();
    return v;
  }

  virtual bool trainable() const = 0;
  virtual bool trained() const = 0;
  virtual TrainReport train(const PairDataset& pairs, const TrainConfig& config,
                            const PairDataset& validation) = 0;
  virtual json save_state() const = 0;
  virtual void load_state(const json& state) = 0;
  virtual bool supports_concurrent_inference() const { return false; }
  virtual std::string id() const = 0;

 protected:
  virtual SimilarityVector do_score(const std::string& text_a, const std::string& text_b) const = 0;
};

/// Name-keyed backend factories. Adapter plugins register under string keys
/// at load time; the core library only ever looks names up.
class BackendRegistry {
 public:
  using GeneratorFactory = std::function<std::shared_ptr<TextGenerator>(const json& params)>;
  using EncoderFactory = std::function<std::shared_ptr<TextEncoder>(const json& params)>;
  using ScorerFactory = std::function<std::shared_ptr<PairScorer>(
      const json& params, std::shared_ptr<TextEncoder> encoder)>;

  static BackendRegistry& instance() {
    static BackendRegistry reg;
    return reg;
  }

  void register_generator(const std::string& name, GeneratorFactory f) {
    generators_[name] = std::move(f);
  }
  void register_encoder(const std::string& name, EncoderFactory f) {
    encoders_[name] = std::move(f);
  }
  void register_scorer(const std::string& name, ScorerFactory f) { scorers_[name] = std::move(f); }

  std::shared_ptr<TextGenerator> make_generator(const std::string& name, const json& params) const {
    auto it = generators_.find(name);
    if (it == generators_.end())
      throw ConfigError("unknown generator backend '" + name + "'" + known(generators_));
    return it->second(params);
  }
  std::shared_ptr<TextEncoder> make_encoder(const std::string& name, const json& params) const {
    auto it = encoders_.find(name);
    if (it == encoders_.end())
      throw ConfigError("unknown encoder backend '" + name + "'" + known(encoders_));
    return it->second(params);
  }
  std::shared_ptr<PairScorer> make_scorer(const std::string& name, const json& params,
                                          std::shared_ptr<TextEncoder> encoder) const {
    auto it = scorers_.find(name);
    if (it == scorers_.end())
      throw ConfigError("unknown scorer backend '" + name + "'" + known(scorers_));
    return it->second(params, std::move(encoder));
  }

 private:
  BackendRegistry() = default;

  template <class M>
  static std::string known(const M& m) {
    std::string s = " (known:";
    for (const auto& [k, _] : m) s += " " + k;
    return s + ")";
  }

  std::map<std::string, GeneratorFactory> generators_;
  std::map<std::string, EncoderFactory> encoders_;
  std::map<std::string, ScorerFactory> scorers_;
};

}  // namespace anchorcls
