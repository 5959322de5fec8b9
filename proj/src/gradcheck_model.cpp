#include "hynn/gradcheck.hpp"
#include "hynn/metrics.hpp"
#include "hynn/model.hpp"
#include "hynn/synthetic.hpp"

namespace hynn {

namespace {

using ad::Var;

ad::Vec rand_ball_vec(std::mt19937_64& rng, int dim, double max_norm) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.05, max_norm);
  ad::Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
  return v * (unif(rng) / std::max(v.norm(), 1e-12));
}

ad::Vec rand_dense(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> gauss(0.0, scale);
  ad::Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = gauss(rng);
  return v;
}

// Runs one scalar-valued forward over a parameter store and checks its
// tape gradient against central differences.
ComponentCheck check_component(const std::string& name,
                               const std::function<Var(ad::Tape&, Ctx&, const ParamStore&)>& fwd,
                               const ParamStore& params, double tol, int max_coords,
                               std::uint64_t seed, double step = 1e-4) {
  auto value_of = [&](const ParamStore& ps) {
    ad::Tape tape;
    Ctx ctx(tape, ps);
    return tape.scalar_value(fwd(tape, ctx, ps));
  };
  ad::Tape tape;
  Ctx ctx(tape, params);
  Var loss = fwd(tape, ctx, params);
  tape.backward(loss);
  auto analytic = ctx.gradients();
  auto res = finite_diff_check(value_of, params, analytic, step, max_coords, seed);
  return ComponentCheck{name, res.max_rel_err, res.max_rel_err < tol};
}

}  // namespace

std::vector<ComponentCheck> gradcheck_components(int d_M, int d_C, int d_S, std::uint64_t seed,
                                                 double tol) {
  std::mt19937_64 rng(seed);
  std::vector<ComponentCheck> report;

  auto glorot = [&](ParamStore& ps, const std::string& name, int rows, int cols) {
    double limit = std::sqrt(6.0 / (rows + cols));
    ad::Vec v = rand_dense(rng, rows * cols, 1.0);
    v = v.unaryExpr([&](double x) { return std::tanh(x) * limit; });
    return ps.add(name, Manifold::Euclidean, rows, cols, v);
  };
  auto ball = [&](ParamStore& ps, const std::string& name, int dim, double max_norm = 0.5) {
    return ps.add(name, Manifold::PoincareBall, dim, 1, rand_ball_vec(rng, dim, max_norm));
  };

  {  // FFNN
    ParamStore ps;
    Linear layer{SpaceTag::Hyperbolic, glorot(ps, "M", 4, 5), ball(ps, "b", 4), 4, 5,
                 Activation::Tanh};
    int x = ball(ps, "x", 5, 0.7);
    report.push_back(check_component(
        "ffnn",
        [=](ad::Tape&, Ctx& ctx, const ParamStore&) {
          return ad::sqnorm(layer.forward(ctx, ctx.leaf(x)));
        },
        ps, tol, -1, seed));
  }
  {  // RNN
    ParamStore ps;
    RNNCell cell{SpaceTag::Hyperbolic, glorot(ps, "W", 4, 4), glorot(ps, "U", 4, 4),
                 ball(ps, "b", 4), 4, 4, Activation::Identity};
    int h = ball(ps, "h", 4, 0.6);
    int c = ball(ps, "c", 4, 0.6);
    report.push_back(check_component(
        "rnn",
        [=](ad::Tape&, Ctx& ctx, const ParamStore&) {
          return ad::sqnorm(cell.step(ctx, ctx.leaf(h), ctx.leaf(c)));
        },
        ps, tol, -1, seed));
  }
  {  // GRU
    ParamStore ps;
    GRUCell cell;
    cell.space = SpaceTag::Hyperbolic;
    cell.dim = 4;
    cell.in_dim = 5;
    cell.Wr = glorot(ps, "Wr", 4, 4);
    cell.Ur = glorot(ps, "Ur", 4, 5);
    cell.br = ball(ps, "br", 4);
    cell.Wz = glorot(ps, "Wz", 4, 4);
    cell.Uz = glorot(ps, "Uz", 4, 5);
    cell.bz = ball(ps, "bz", 4);
    cell.W = glorot(ps, "W", 4, 4);
    cell.U = glorot(ps, "U", 4, 5);
    cell.b = ball(ps, "b", 4);
    int h = ball(ps, "h", 4, 0.6);
    int x = ball(ps, "x", 5, 0.6);
    report.push_back(check_component(
        "gru",
        [=](ad::Tape&, Ctx& ctx, const ParamStore&) {
          return ad::sqnorm(cell.step(ctx, ctx.leaf(h), ctx.leaf(x)));
        },
        ps, tol, -1, seed));
  }
  {  // concat
    ParamStore ps;
    Concat2 cc{SpaceTag::Hyperbolic, glorot(ps, "M1", 5, 4), glorot(ps, "M2", 5, 3),
               ball(ps, "b", 5), 5, 4, 3};
    int x = ball(ps, "x", 4, 0.6);
    int y = ball(ps, "y", 3, 0.6);
    report.push_back(check_component(
        "concat",
        [=](ad::Tape&, Ctx& ctx, const ParamStore&) {
          return ad::sqnorm(cc.forward(ctx, ctx.leaf(x), ctx.leaf(y)));
        },
        ps, tol, -1, seed));
  }
  {  // attention
    ParamStore ps;
    DistanceAttention att;
    att.space = SpaceTag::Hyperbolic;
    att.dim = 4;
    att.Wq = glorot(ps, "Wq", 4, 4);
    att.bq = ball(ps, "bq", 4);
    att.Wk = glorot(ps, "Wk", 4, 4);
    att.bk = ball(ps, "bk", 4);
    att.beta = ps.add("beta", Manifold::Euclidean, 1, 1, ad::Vec::Constant(1, 1.0));
    for (int i = 0; i < 3; ++i) att.position_table.push_back(ball(ps, "pos" + std::to_string(i), 4, 0.2));
    std::vector<int> xs;
    for (int i = 0; i < 3; ++i) xs.push_back(ball(ps, "x" + std::to_string(i), 4, 0.6));
    report.push_back(check_component(
        "attention",
        [=](ad::Tape&, Ctx& ctx, const ParamStore&) {
          std::vector<Var> states;
          for (int id : xs) states.push_back(ctx.leaf(id));
          return ad::sqnorm(att.forward(ctx, states, {0, 1, 2}));
        },
        ps, tol, -1, seed));
  }
  {  // MLR
    ParamStore ps;
    MLR mlr;
    mlr.space = SpaceTag::Hyperbolic;
    mlr.dim = 5;
    for (int k = 0; k < 3; ++k) {
      mlr.p.push_back(ball(ps, "p" + std::to_string(k), 5, 0.5));
      mlr.a.push_back(ps.add("a" + std::to_string(k), Manifold::Euclidean, 5, 1,
                             rand_dense(rng, 5, 0.7)));
    }
    int x = ball(ps, "x", 5, 0.6);
    report.push_back(check_component(
        "mlr",
        [=](ad::Tape&, Ctx& ctx, const ParamStore&) {
          return ad::sqnorm(mlr.logits(ctx, ctx.leaf(x)));
        },
        ps, tol, -1, seed));
  }
  {  // end-to-end multitask loss
    SyntheticSpec sspec;
    sspec.depth = 3;
    sspec.branching = 2;
    sspec.dim = 6;
    sspec.n_train = 1;
    sspec.n_test = 0;
    sspec.seed = seed;
    SyntheticData data = generate_tree_data(sspec);

    ModelConfig mcfg;
    mcfg.d_M = d_M;
    mcfg.d_C = d_C;
    mcfg.d_S = d_S;
    mcfg.embed_dim = sspec.dim;
    mcfg.K = data.inventory.size();
    mcfg.char_vocab = 32;
    mcfg.dropout_input = 0.0;
    mcfg.dropout_concat = 0.0;
    Model model(mcfg, seed);
    const TypedExample& ex = data.train[0];
    auto fwd = [&](ad::Tape&, Ctx& ctx, const ParamStore&) {
      Var logits = model.classify(ctx, ex, data.table);
      return multitask_loss(logits, gold_mask_of(ex.gold_labels, mcfg.K), data.inventory);
    };
    // Larger step: the deep composition's evaluation noise would otherwise
    // swamp the tiny attention gradients.
    report.push_back(check_component("end_to_end", fwd, model.params(), tol, 6, seed, 1e-3));
  }
  return report;
}

}  // namespace hynn
