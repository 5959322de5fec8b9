#ifndef HYNN_LAYERS_HPP
#define HYNN_LAYERS_HPP

#include "hynn/geometry_ad.hpp"
#include "hynn/params.hpp"

namespace hynn {

enum class SpaceTag { Hyperbolic, Euclidean };

inline const char* to_string(SpaceTag s) {
  return s == SpaceTag::Hyperbolic ? "hyperbolic" : "euclidean";
}

enum class Activation { Identity, Tanh };

// Manifold bridges used at component boundaries when spaces are mixed.
ad::Var to_euclidean(ad::Var x);   // log0
ad::Var to_hyperbolic(ad::Var v);  // exp0 (projection included)

// One-layer feed-forward: phi(M x (+) b). Hyperbolic form is
// phi_tangent(M (x) x (+) b); Euclidean form is phi(Mx + b).
struct Linear {
  SpaceTag space;
  int M = -1, b = -1;
  int out_dim = 0, in_dim = 0;
  Activation act = Activation::Identity;

  ad::Var forward(Ctx& ctx, ad::Var x) const;
};

// Plain recurrent cell: phi(W h (+) U c (+) b), left-associated.
struct RNNCell {
  SpaceTag space;
  int W = -1, U = -1, b = -1;
  int dim = 0, in_dim = 0;
  Activation act = Activation::Identity;

  ad::Var step(Ctx& ctx, ad::Var h, ad::Var c) const;
};

struct GRUCell {
  SpaceTag space;
  int Wr = -1, Ur = -1, br = -1;
  int Wz = -1, Uz = -1, bz = -1;
  int W = -1, U = -1, b = -1;
  int dim = 0, in_dim = 0;

  ad::Var step(Ctx& ctx, ad::Var h, ad::Var x) const;
};

// Generalized concatenation: M1 x (+) M2 y (+) b.
struct Concat2 {
  SpaceTag space;
  int M1 = -1, M2 = -1, b = -1;
  int out_dim = 0, in1 = 0, in2 = 0;

  ad::Var forward(Ctx& ctx, ad::Var x, ad::Var y) const;
};

// Fused three-way concatenation: M1 a (+) M2 b (+) M3 c (+) bias.
struct Concat3 {
  SpaceTag space;
  int M1 = -1, M2 = -1, M3 = -1, b = -1;
  int out_dim = 0, in1 = 0, in2 = 0, in3 = 0;

  ad::Var forward(Ctx& ctx, ad::Var x, ad::Var y, ad::Var z) const;
};

// Distance attention: positions are added to the states, queries/keys are
// linear images of the enriched states, weights are
// softmax(-beta d(q_i, k_i)), and the enriched states are pooled with the
// Mobius midpoint (hyperbolic) or a weighted arithmetic mean (Euclidean).
struct DistanceAttention {
  SpaceTag space;
  int Wq = -1, bq = -1, Wk = -1, bk = -1;
  int beta = -1;
  std::vector<int> position_table;
  int dim = 0;

  // pos_index[i] selects the position embedding for states[i].
  ad::Var forward(Ctx& ctx, const std::vector<ad::Var>& states,
                  const std::vector<int>& pos_index) const;
  ad::Var weights(Ctx& ctx, const std::vector<ad::Var>& enriched) const;
  ad::Var enrich(Ctx& ctx, ad::Var state, int pos_index) const;
};

// Multinomial logistic regression with per-class hyperplanes. The
// hyperbolic logits use the tangent-space reparameterization of the
// normals, so both p_k and a_k are optimized without constraints coupling.
struct MLR {
  SpaceTag space;
  std::vector<int> p;  // K points (ball for hyperbolic)
  std::vector<int> a;  // K normals (Euclidean parameters in both cases)
  int dim = 0;

  ad::Var logits(Ctx& ctx, ad::Var x) const;
};

// Uniform-weight pooling of a state sequence.
ad::Var pool_midpoint(Ctx& ctx, SpaceTag space, const std::vector<ad::Var>& states);

// Dropout keeping ball points in the ball: applied on tangent coordinates
// with inverted scaling. Identity when not training or rate == 0.
ad::Var dropout(Ctx& ctx, SpaceTag space, ad::Var x, double rate);

std::vector<int> multilabel_predict(const ad::Vec& logits);

}  // namespace hynn

#endif
