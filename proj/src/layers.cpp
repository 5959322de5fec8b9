#include "hynn/layers.hpp"

namespace hynn {

using ad::Var;

namespace {

Var apply_act(Ctx&, SpaceTag space, Activation act, Var x) {
  if (act == Activation::Identity) return x;
  return space == SpaceTag::Hyperbolic ? ad::t_tanh_pointwise(x) : ad::tanh_v(x);
}

// (W diag(r)) (x) h: the Mobius matvec closed form with Wx = W (r .* h)
// and the tangent norm taken at h.
Var mobius_gated_matvec(Ctx& ctx, int Wid, int rows, int cols, Var r, Var h) {
  geometry_op_counter()++;
  ad::Tape& t = ctx.tape;
  Var mx = ad::matvec(ctx.leaf(Wid), rows, cols, ad::cmul(r, h));
  if (t.value(h).norm() < stability().eps_zero || t.value(mx).norm() < stability().eps_zero)
    return t.constant(ad::Vec::Zero(rows));
  Var nh = ad::norm(h);
  Var nmx = ad::norm(mx);
  Var s = ad::s_div(ad::s_tanh(ad::s_mul(ad::s_div(nmx, nh), ad::s_atanh(nh))), nmx);
  return ad::t_project(ad::scale(mx, s));
}

Var stack_scalars(ad::Tape&, const std::vector<Var>& xs) {
  Var out = xs[0];
  for (size_t i = 1; i < xs.size(); ++i) out = ad::vconcat(out, xs[i]);
  return out;
}

}  // namespace

Var to_euclidean(Var x) { return ad::t_log0(x); }
Var to_hyperbolic(Var v) { return ad::t_exp0(v); }

Var Linear::forward(Ctx& ctx, Var x) const {
  if (ctx.tape.size(x) != in_dim) throw std::invalid_argument("Linear: dimension mismatch");
  if (space == SpaceTag::Hyperbolic) {
    Var y = ad::t_mobius_add(ad::t_mobius_matvec(ctx.leaf(M), out_dim, in_dim, x), ctx.leaf(b));
    return apply_act(ctx, space, act, y);
  }
  Var y = ad::add(ad::matvec(ctx.leaf(M), out_dim, in_dim, x), ctx.leaf(b));
  return apply_act(ctx, space, act, y);
}

Var RNNCell::step(Ctx& ctx, Var h, Var c) const {
  if (space == SpaceTag::Hyperbolic) {
    Var wh = ad::t_mobius_matvec(ctx.leaf(W), dim, dim, h);
    Var uc = ad::t_mobius_matvec(ctx.leaf(U), dim, in_dim, c);
    Var y = ad::t_mobius_add(ad::t_mobius_add(wh, uc), ctx.leaf(b));
    return apply_act(ctx, space, act, y);
  }
  Var y = ad::add(ad::add(ad::matvec(ctx.leaf(W), dim, dim, h),
                          ad::matvec(ctx.leaf(U), dim, in_dim, c)),
                  ctx.leaf(b));
  return apply_act(ctx, space, act, y);
}

Var GRUCell::step(Ctx& ctx, Var h, Var x) const {
  if (space == SpaceTag::Hyperbolic) {
    auto gate = [&](int Wg, int Ug, int bg) {
      Var pre = ad::t_mobius_add(
          ad::t_mobius_add(ad::t_mobius_matvec(ctx.leaf(Wg), dim, dim, h),
                           ad::t_mobius_matvec(ctx.leaf(Ug), dim, in_dim, x)),
          ctx.leaf(bg));
      return ad::sigmoid_v(ad::t_log0(pre));
    };
    Var r = gate(Wr, Ur, br);
    Var z = gate(Wz, Uz, bz);
    Var cand = ad::t_tanh_pointwise(ad::t_mobius_add(
        ad::t_mobius_add(mobius_gated_matvec(ctx, W, dim, dim, r, h),
                         ad::t_mobius_matvec(ctx.leaf(U), dim, in_dim, x)),
        ctx.leaf(b)));
    return ad::t_mobius_add(h, ad::t_mobius_diag(z, ad::t_mobius_add(ad::neg(h), cand)));
  }
  auto gate = [&](int Wg, int Ug, int bg) {
    return ad::sigmoid_v(ad::add(ad::add(ad::matvec(ctx.leaf(Wg), dim, dim, h),
                                         ad::matvec(ctx.leaf(Ug), dim, in_dim, x)),
                                 ctx.leaf(bg)));
  };
  Var r = gate(Wr, Ur, br);
  Var z = gate(Wz, Uz, bz);
  Var cand = ad::tanh_v(ad::add(ad::add(ad::matvec(ctx.leaf(W), dim, dim, ad::cmul(r, h)),
                                        ad::matvec(ctx.leaf(U), dim, in_dim, x)),
                                ctx.leaf(b)));
  return ad::add(h, ad::cmul(z, ad::sub(cand, h)));
}

Var Concat2::forward(Ctx& ctx, Var x, Var y) const {
  if (space == SpaceTag::Hyperbolic) {
    Var t1 = ad::t_mobius_matvec(ctx.leaf(M1), out_dim, in1, x);
    Var t2 = ad::t_mobius_matvec(ctx.leaf(M2), out_dim, in2, y);
    return ad::t_mobius_add(ad::t_mobius_add(t1, t2), ctx.leaf(b));
  }
  return ad::add(ad::add(ad::matvec(ctx.leaf(M1), out_dim, in1, x),
                         ad::matvec(ctx.leaf(M2), out_dim, in2, y)),
                 ctx.leaf(b));
}

Var Concat3::forward(Ctx& ctx, Var x, Var y, Var z) const {
  if (space == SpaceTag::Hyperbolic) {
    Var t1 = ad::t_mobius_matvec(ctx.leaf(M1), out_dim, in1, x);
    Var t2 = ad::t_mobius_matvec(ctx.leaf(M2), out_dim, in2, y);
    Var t3 = ad::t_mobius_matvec(ctx.leaf(M3), out_dim, in3, z);
    return ad::t_mobius_add(ad::t_mobius_add(ad::t_mobius_add(t1, t2), t3), ctx.leaf(b));
  }
  return ad::add(ad::add(ad::add(ad::matvec(ctx.leaf(M1), out_dim, in1, x),
                                 ad::matvec(ctx.leaf(M2), out_dim, in2, y)),
                         ad::matvec(ctx.leaf(M3), out_dim, in3, z)),
                 ctx.leaf(b));
}

Var DistanceAttention::enrich(Ctx& ctx, Var state, int pos_index) const {
  if (pos_index >= static_cast<int>(position_table.size()))
    throw std::invalid_argument("DistanceAttention: position index out of range");
  Var p = ctx.leaf(position_table[pos_index]);
  return space == SpaceTag::Hyperbolic ? ad::t_mobius_add(state, p) : ad::add(state, p);
}

Var DistanceAttention::weights(Ctx& ctx, const std::vector<Var>& enriched) const {
  std::vector<Var> dists;
  dists.reserve(enriched.size());
  for (Var r : enriched) {
    Var q, k;
    if (space == SpaceTag::Hyperbolic) {
      q = ad::t_mobius_add(ad::t_mobius_matvec(ctx.leaf(Wq), dim, dim, r), ctx.leaf(bq));
      k = ad::t_mobius_add(ad::t_mobius_matvec(ctx.leaf(Wk), dim, dim, r), ctx.leaf(bk));
      dists.push_back(ad::t_distance(q, k));
    } else {
      q = ad::add(ad::matvec(ctx.leaf(Wq), dim, dim, r), ctx.leaf(bq));
      k = ad::add(ad::matvec(ctx.leaf(Wk), dim, dim, r), ctx.leaf(bk));
      dists.push_back(ad::norm(ad::sub(q, k)));
    }
  }
  Var d = stack_scalars(ctx.tape, dists);
  return ad::softmax(ad::scale(d, ad::neg(ctx.leaf(beta))));
}

Var DistanceAttention::forward(Ctx& ctx, const std::vector<Var>& states,
                               const std::vector<int>& pos_index) const {
  if (states.empty()) throw std::invalid_argument("DistanceAttention: empty sequence");
  std::vector<Var> enriched;
  enriched.reserve(states.size());
  for (size_t i = 0; i < states.size(); ++i) enriched.push_back(enrich(ctx, states[i], pos_index[i]));
  Var w = weights(ctx, enriched);
  if (space == SpaceTag::Hyperbolic) return ad::t_mobius_midpoint(enriched, w);
  Var out = ad::scale(enriched[0], ad::slice(w, 0, 1));
  for (size_t i = 1; i < enriched.size(); ++i)
    out = ad::add(out, ad::scale(enriched[i], ad::slice(w, static_cast<int>(i), 1)));
  return out;
}

Var MLR::logits(Ctx& ctx, Var x) const {
  std::vector<Var> out;
  out.reserve(p.size());
  ad::Tape& t = ctx.tape;
  Var one = t.scalar(1.0);
  for (size_t k = 0; k < p.size(); ++k) {
    Var pk = ctx.leaf(p[k]);
    Var ak = ctx.leaf(a[k]);
    if (space == SpaceTag::Hyperbolic) {
      Var d = ad::t_mobius_add(ad::neg(pk), x);
      Var na = ad::norm(ak);
      Var num = ad::scale(ad::dot(d, ak), 2.0);
      Var den = ad::s_mul(ad::sub(one, ad::sqnorm(d)), na);
      out.push_back(ad::s_mul(ad::scale(na, 2.0), ad::s_asinh(ad::s_div(num, den))));
    } else {
      out.push_back(ad::scale(ad::dot(ad::sub(x, pk), ak), 4.0));
    }
  }
  return stack_scalars(t, out);
}

Var pool_midpoint(Ctx& ctx, SpaceTag space, const std::vector<Var>& states) {
  if (states.empty()) throw std::invalid_argument("pool_midpoint: empty sequence");
  if (space == SpaceTag::Hyperbolic) {
    Var w = ctx.tape.constant(
        ad::Vec::Constant(states.size(), 1.0 / static_cast<double>(states.size())));
    return ad::t_mobius_midpoint(states, w);
  }
  Var out = states[0];
  for (size_t i = 1; i < states.size(); ++i) out = ad::add(out, states[i]);
  return ad::scale(out, 1.0 / static_cast<double>(states.size()));
}

Var dropout(Ctx& ctx, SpaceTag space, Var x, double rate) {
  if (!ctx.training || rate <= 0.0) return x;
  if (!ctx.rng) throw std::logic_error("dropout: training context has no RNG");
  int n = ctx.tape.size(x);
  ad::Vec mask(n);
  std::bernoulli_distribution keep(1.0 - rate);
  for (int i = 0; i < n; ++i) mask[i] = keep(*ctx.rng) ? 1.0 / (1.0 - rate) : 0.0;
  Var m = ctx.tape.constant(mask);
  if (space == SpaceTag::Hyperbolic) return ad::t_exp0(ad::cmul(m, ad::t_log0(x)));
  return ad::cmul(m, x);
}

std::vector<int> multilabel_predict(const ad::Vec& logits) {
  std::vector<int> out;
  for (Eigen::Index k = 0; k < logits.size(); ++k)
    if (logits[k] > 0.0) out.push_back(static_cast<int>(k));
  return out;
}

}  // namespace hynn
