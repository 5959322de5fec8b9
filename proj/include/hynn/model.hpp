#ifndef HYNN_MODEL_HPP
#define HYNN_MODEL_HPP

#include "hynn/data.hpp"
#include "hynn/layers.hpp"

#include <atomic>

namespace hynn {

// Per-component manifold choice: each stage of the pipeline can run in
// hyperbolic or Euclidean space, with exp0/log0 bridges at the seams.
struct ComponentSpaceConfig {
  SpaceTag encoder = SpaceTag::Hyperbolic;
  SpaceTag attention = SpaceTag::Hyperbolic;
  SpaceTag concat = SpaceTag::Hyperbolic;
  SpaceTag mlr = SpaceTag::Hyperbolic;

  // Number of conversion sites a forward pass exercises: the
  // encoder/attention seam is crossed by the mention-word, mention-char,
  // and context paths separately; the later seams are crossed once each.
  int expected_crossings() const {
    int c = 0;
    if (encoder != attention) c += 3;
    if (attention != concat) ++c;
    if (concat != mlr) ++c;
    return c;
  }
  bool operator==(const ComponentSpaceConfig&) const = default;
};

struct ModelConfig {
  int d_M = 40;
  int d_C = 20;
  int d_S = 20;
  int embed_dim = 0;  // input word-embedding dimension n
  int K = 0;          // label count
  int char_vocab = 128;
  int max_mention_len = 20;
  int max_rel = 50;  // relative-position clip for the context encoder
  double dropout_input = 0.2;
  double dropout_concat = 0.1;
  ComponentSpaceConfig spaces;

  int m() const { return d_M + d_C + 2 * d_S; }
  void validate() const;
};

// Mention encoder (word FFNN + attention, char RNN + midpoint), context
// encoder (bi-GRU + attention), fused three-way concatenation, and MLR.
class Model {
 public:
  Model(const ModelConfig& cfg, std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  // Word + char mention representations, in attention space.
  std::pair<ad::Var, ad::Var> encode_mention(Ctx& ctx, const TypedExample& ex,
                                             const EmbeddingTable& table) const;
  // Context representation, in attention space.
  ad::Var encode_context(Ctx& ctx, const TypedExample& ex, const EmbeddingTable& table) const;

  ad::Var classify(Ctx& ctx, const TypedExample& ex, const EmbeddingTable& table) const;

  // Representation fed to the classifier (after concat, before MLR-space
  // conversion), in concat space.
  ad::Var text_vector(Ctx& ctx, const TypedExample& ex, const EmbeddingTable& table) const;

  // Hyperbolic concat space: d(0, v); Euclidean: |v|.
  double text_vector_norm(const TypedExample& ex, const EmbeddingTable& table) const;

  ad::Vec predict_logits(const TypedExample& ex, const EmbeddingTable& table) const;

  // Distance between two class points p_j, p_k (hyperbolic or Euclidean
  // per the MLR space).
  double class_point_distance(int j, int k) const;

  std::uint64_t crossings() const { return crossings_.load(); }
  void reset_crossings() const { crossings_.store(0); }

  const MLR& mlr() const { return mlr_; }

 private:
  ad::Var embed_token(Ctx& ctx, const std::string& token, const EmbeddingTable& table) const;
  ad::Var bridge(Ctx& ctx, ad::Var x, SpaceTag from, SpaceTag to) const;

  ModelConfig cfg_;
  ParamStore params_;

  Linear mention_ffnn_;
  DistanceAttention mention_attention_;
  RNNCell char_rnn_;
  std::vector<int> char_embeddings_;
  GRUCell gru_fwd_, gru_bwd_;
  Concat2 token_concat_;
  DistanceAttention context_attention_;
  Concat3 final_concat_;
  MLR mlr_;
  int oov_embedding_ = -1;

  mutable std::atomic<std::uint64_t> crossings_{0};
};

}  // namespace hynn

#endif
