#include <doctest.h>

#include "hynn/layers.hpp"

#include "test_util.hpp"

using namespace hynn;
using ad::Var;

namespace {

ad::Vec flatten(const Mat& m) {
  ad::Vec v(m.rows() * m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) v[m.cols() * r + c] = m(r, c);
  return v;
}

int add_mat(ParamStore& ps, const std::string& name, const Mat& m) {
  return ps.add(name, Manifold::Euclidean, static_cast<int>(m.rows()),
                static_cast<int>(m.cols()), flatten(m));
}

int add_ball(ParamStore& ps, const std::string& name, const Vec& v) {
  return ps.add(name, Manifold::PoincareBall, static_cast<int>(v.size()), 1, v);
}

Vec tanh_pointwise(const Vec& x) {
  return mobius_pointwise([](double t) { return safe_tanh(t); }, x);
}

}  // namespace

TEST_CASE("hyperbolic linear equals kernel composition") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    int in = 2 + static_cast<int>(rng() % 6);
    int out = 2 + static_cast<int>(rng() % 6);
    Mat M = testutil::rand_mat(rng, out, in, 0.8);
    Vec b = testutil::rand_ball(rng, out, 0.5);
    Vec x = testutil::rand_ball(rng, in, 0.8);

    ParamStore ps;
    Linear layer{SpaceTag::Hyperbolic, add_mat(ps, "M", M), add_ball(ps, "b", b), out, in,
                 Activation::Tanh};
    ad::Tape tape;
    Ctx ctx(tape, ps);
    ad::Vec got = tape.value(layer.forward(ctx, tape.constant(x)));

    Vec want = tanh_pointwise(mobius_add(mobius_matvec(M, x), b));
    CHECK((got - want).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("euclidean linear is phi(Mx + b)") {
  std::mt19937_64 rng(103);
  Mat M = testutil::rand_mat(rng, 3, 4);
  Vec b = testutil::rand_vec(rng, 3);
  Vec x = testutil::rand_vec(rng, 4);
  ParamStore ps;
  Linear layer{SpaceTag::Euclidean, add_mat(ps, "M", M), ps.add("b", Manifold::Euclidean, 3, 1, b),
               3, 4, Activation::Tanh};
  ad::Tape tape;
  Ctx ctx(tape, ps);
  ad::Vec got = tape.value(layer.forward(ctx, tape.constant(x)));
  Vec want = (M * x + b).array().tanh();
  CHECK((got - want).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("hyperbolic RNN cell equals kernel composition") {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 100; ++trial) {
    int dim = 2 + static_cast<int>(rng() % 5);
    int in = 2 + static_cast<int>(rng() % 5);
    Mat W = testutil::rand_mat(rng, dim, dim, 0.7);
    Mat U = testutil::rand_mat(rng, dim, in, 0.7);
    Vec b = testutil::rand_ball(rng, dim, 0.4);
    Vec h = testutil::rand_ball(rng, dim, 0.7);
    Vec c = testutil::rand_ball(rng, in, 0.7);

    ParamStore ps;
    RNNCell cell{SpaceTag::Hyperbolic, add_mat(ps, "W", W), add_mat(ps, "U", U),
                 add_ball(ps, "b", b), dim, in, Activation::Tanh};
    ad::Tape tape;
    Ctx ctx(tape, ps);
    ad::Vec got = tape.value(cell.step(ctx, tape.constant(h), tape.constant(c)));

    Vec want = tanh_pointwise(
        mobius_add(mobius_add(mobius_matvec(W, h), mobius_matvec(U, c)), b));
    CHECK((got - want).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("hyperbolic GRU cell equals kernel composition") {
  std::mt19937_64 rng(109);
  for (int trial = 0; trial < 100; ++trial) {
    int dim = 2 + static_cast<int>(rng() % 4);
    int in = 2 + static_cast<int>(rng() % 4);
    Mat Wr = testutil::rand_mat(rng, dim, dim, 0.6), Ur = testutil::rand_mat(rng, dim, in, 0.6);
    Mat Wz = testutil::rand_mat(rng, dim, dim, 0.6), Uz = testutil::rand_mat(rng, dim, in, 0.6);
    Mat W = testutil::rand_mat(rng, dim, dim, 0.6), U = testutil::rand_mat(rng, dim, in, 0.6);
    Vec br = testutil::rand_ball(rng, dim, 0.3), bz = testutil::rand_ball(rng, dim, 0.3);
    Vec b = testutil::rand_ball(rng, dim, 0.3);
    Vec h = testutil::rand_ball(rng, dim, 0.7), x = testutil::rand_ball(rng, in, 0.7);

    ParamStore ps;
    GRUCell cell;
    cell.space = SpaceTag::Hyperbolic;
    cell.dim = dim;
    cell.in_dim = in;
    cell.Wr = add_mat(ps, "Wr", Wr);
    cell.Ur = add_mat(ps, "Ur", Ur);
    cell.br = add_ball(ps, "br", br);
    cell.Wz = add_mat(ps, "Wz", Wz);
    cell.Uz = add_mat(ps, "Uz", Uz);
    cell.bz = add_ball(ps, "bz", bz);
    cell.W = add_mat(ps, "W", W);
    cell.U = add_mat(ps, "U", U);
    cell.b = add_ball(ps, "b", b);
    ad::Tape tape;
    Ctx ctx(tape, ps);
    ad::Vec got = tape.value(cell.step(ctx, tape.constant(h), tape.constant(x)));

    auto gate = [&](const Mat& Wg, const Mat& Ug, const Vec& bg) {
      Vec pre = mobius_add(mobius_add(mobius_matvec(Wg, h), mobius_matvec(Ug, x)), bg);
      Vec t = log0(pre);
      for (int i = 0; i < dim; ++i) t[i] = 1.0 / (1.0 + std::exp(-t[i]));
      return t;
    };
    Vec r = gate(Wr, Ur, br);
    Vec z = gate(Wz, Uz, bz);
    // (W diag(r)) applied as a single Mobius matvec
    Mat Wdr = W * r.asDiagonal();
    Vec cand = tanh_pointwise(
        mobius_add(mobius_add(mobius_matvec(Wdr, h), mobius_matvec(U, x)), b));
    Vec delta = mobius_add(-h, cand);
    Vec want = mobius_add(h, exp0(Vec(z.array() * log0(delta).array())));
    CHECK((got - want).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("GRU gate extremes reduce to h and candidate") {
  std::mt19937_64 rng(113);
  Vec h = testutil::rand_ball(rng, 5, 0.6);
  Vec cand = testutil::rand_ball(rng, 5, 0.6);
  ad::Tape tape;
  Var vh = tape.constant(h), vc = tape.constant(cand);
  Var delta = ad::t_mobius_add(ad::neg(vh), vc);
  // z = 0: h' = h (+) exp0(0) = h
  Var z0 = tape.constant(ad::Vec::Zero(5));
  ad::Vec h0 = tape.value(ad::t_mobius_add(vh, ad::t_mobius_diag(z0, delta)));
  CHECK((h0 - h).lpNorm<Eigen::Infinity>() < 1e-12);
  // z = 1: h' = h (+) ((-h) (+) cand) = cand by left cancellation
  Var z1 = tape.constant(ad::Vec::Ones(5));
  ad::Vec h1 = tape.value(ad::t_mobius_add(vh, ad::t_mobius_diag(z1, delta)));
  CHECK((h1 - cand).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("hyperbolic concat layers equal kernel composition") {
  std::mt19937_64 rng(127);
  for (int trial = 0; trial < 100; ++trial) {
    int out = 2 + static_cast<int>(rng() % 5);
    int in1 = 2 + static_cast<int>(rng() % 4), in2 = 2 + static_cast<int>(rng() % 4),
        in3 = 2 + static_cast<int>(rng() % 4);
    Mat M1 = testutil::rand_mat(rng, out, in1, 0.7), M2 = testutil::rand_mat(rng, out, in2, 0.7),
        M3 = testutil::rand_mat(rng, out, in3, 0.7);
    Vec b = testutil::rand_ball(rng, out, 0.4);
    Vec x = testutil::rand_ball(rng, in1, 0.7), y = testutil::rand_ball(rng, in2, 0.7),
        z = testutil::rand_ball(rng, in3, 0.7);

    {
      ParamStore ps;
      Concat2 cc{SpaceTag::Hyperbolic, add_mat(ps, "M1", M1), add_mat(ps, "M2", M2),
                 add_ball(ps, "b", b), out, in1, in2};
      ad::Tape tape;
      Ctx ctx(tape, ps);
      ad::Vec got = tape.value(cc.forward(ctx, tape.constant(x), tape.constant(y)));
      Vec want = mobius_add(mobius_add(mobius_matvec(M1, x), mobius_matvec(M2, y)), b);
      CHECK((got - want).lpNorm<Eigen::Infinity>() < 1e-12);
    }
    {
      ParamStore ps;
      Concat3 cc{SpaceTag::Hyperbolic, add_mat(ps, "M1", M1), add_mat(ps, "M2", M2),
                 add_mat(ps, "M3", M3), add_ball(ps, "b", b), out, in1, in2, in3};
      ad::Tape tape;
      Ctx ctx(tape, ps);
      ad::Vec got =
          tape.value(cc.forward(ctx, tape.constant(x), tape.constant(y), tape.constant(z)));
      Vec want = mobius_add(
          mobius_add(mobius_add(mobius_matvec(M1, x), mobius_matvec(M2, y)), mobius_matvec(M3, z)),
          b);
      CHECK((got - want).lpNorm<Eigen::Infinity>() < 1e-12);
    }
  }
}

namespace {

struct AttentionFixture {
  ParamStore ps;
  DistanceAttention att;
  Mat Wq, Wk;
  Vec bq, bk;
  std::vector<Vec> pos;

  AttentionFixture(std::mt19937_64& rng, int dim, int len, double beta_val = 1.0) {
    Wq = testutil::rand_mat(rng, dim, dim, 0.6);
    Wk = testutil::rand_mat(rng, dim, dim, 0.6);
    bq = testutil::rand_ball(rng, dim, 0.3);
    bk = testutil::rand_ball(rng, dim, 0.3);
    att.space = SpaceTag::Hyperbolic;
    att.dim = dim;
    att.Wq = add_mat(ps, "Wq", Wq);
    att.bq = add_ball(ps, "bq", bq);
    att.Wk = add_mat(ps, "Wk", Wk);
    att.bk = add_ball(ps, "bk", bk);
    att.beta = ps.add("beta", Manifold::Euclidean, 1, 1, ad::Vec::Constant(1, beta_val));
    for (int i = 0; i < len; ++i) {
      pos.push_back(testutil::rand_ball(rng, dim, 0.2));
      att.position_table.push_back(add_ball(ps, "pos" + std::to_string(i), pos.back()));
    }
  }
};

}  // namespace

TEST_CASE("attention weights sum to one") {
  std::mt19937_64 rng(131);
  for (int trial = 0; trial < 50; ++trial) {
    int dim = 2 + static_cast<int>(rng() % 5);
    int len = 1 + static_cast<int>(rng() % 6);
    AttentionFixture fx(rng, dim, len);
    ad::Tape tape;
    Ctx ctx(tape, fx.ps);
    std::vector<Var> enriched;
    std::vector<int> idx;
    for (int i = 0; i < len; ++i) {
      enriched.push_back(fx.att.enrich(ctx, tape.constant(testutil::rand_ball(rng, dim, 0.6)), i));
      idx.push_back(i);
    }
    ad::Vec w = tape.value(fx.att.weights(ctx, enriched));
    CHECK(std::abs(w.sum() - 1.0) < 1e-12);
    CHECK(w.minCoeff() >= 0.0);
  }
}

TEST_CASE("attention over a single state returns the enriched state") {
  std::mt19937_64 rng(137);
  AttentionFixture fx(rng, 4, 1);
  Vec x = testutil::rand_ball(rng, 4, 0.6);
  ad::Tape tape;
  Ctx ctx(tape, fx.ps);
  ad::Vec got = tape.value(fx.att.forward(ctx, {tape.constant(x)}, {0}));
  Vec want = mobius_add(x, fx.pos[0]);  // midpoint of one point with weight 1
  CHECK((got - want).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("beta = 0 gives uniform weights") {
  std::mt19937_64 rng(139);
  AttentionFixture fx(rng, 4, 5, 0.0);
  ad::Tape tape;
  Ctx ctx(tape, fx.ps);
  std::vector<Var> enriched;
  for (int i = 0; i < 5; ++i)
    enriched.push_back(fx.att.enrich(ctx, tape.constant(testutil::rand_ball(rng, 4, 0.6)), i));
  ad::Vec w = tape.value(fx.att.weights(ctx, enriched));
  for (int i = 0; i < 5; ++i) CHECK(w[i] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("identical enriched states give uniform weights") {
  std::mt19937_64 rng(149);
  AttentionFixture fx(rng, 4, 3, 2.5);
  Vec same = testutil::rand_ball(rng, 4, 0.5);
  ad::Tape tape;
  Ctx ctx(tape, fx.ps);
  std::vector<Var> enriched(3, tape.constant(same));
  ad::Vec w = tape.value(fx.att.weights(ctx, enriched));
  for (int i = 0; i < 3; ++i) CHECK(w[i] == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("attention forward equals kernel composition") {
  std::mt19937_64 rng(151);
  for (int trial = 0; trial < 100; ++trial) {
    int dim = 2 + static_cast<int>(rng() % 4);
    int len = 2 + static_cast<int>(rng() % 4);
    AttentionFixture fx(rng, dim, len, 1.3);
    std::vector<Vec> xs;
    for (int i = 0; i < len; ++i) xs.push_back(testutil::rand_ball(rng, dim, 0.6));

    ad::Tape tape;
    Ctx ctx(tape, fx.ps);
    std::vector<Var> states;
    std::vector<int> idx;
    for (int i = 0; i < len; ++i) {
      states.push_back(tape.constant(xs[i]));
      idx.push_back(i);
    }
    ad::Vec got = tape.value(fx.att.forward(ctx, states, idx));

    std::vector<Vec> enriched;
    Vec logits(len);
    for (int i = 0; i < len; ++i) {
      enriched.push_back(mobius_add(xs[i], fx.pos[i]));
      Vec q = mobius_add(mobius_matvec(fx.Wq, enriched[i]), fx.bq);
      Vec k = mobius_add(mobius_matvec(fx.Wk, enriched[i]), fx.bk);
      logits[i] = -1.3 * 2.0 * safe_atanh(mobius_add(-q, k).norm());
    }
    Vec w = (logits.array() - logits.maxCoeff()).exp();
    w /= w.sum();
    Vec want = mobius_midpoint(enriched, std::vector<double>(w.data(), w.data() + len));
    CHECK((got - want).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("hyperbolic MLR matches the independent formula") {
  std::mt19937_64 rng(157);
  for (int trial = 0; trial < 100; ++trial) {
    int dim = 2 + static_cast<int>(rng() % 6);
    Vec x = testutil::rand_ball(rng, dim, 0.8);
    Vec p = testutil::rand_ball(rng, dim, 0.8);
    Vec a = testutil::rand_vec(rng, dim);

    ParamStore ps;
    MLR mlr;
    mlr.space = SpaceTag::Hyperbolic;
    mlr.dim = dim;
    mlr.p.push_back(add_ball(ps, "p", p));
    mlr.a.push_back(ps.add("a", Manifold::Euclidean, dim, 1, a));
    ad::Tape tape;
    Ctx ctx(tape, ps);
    double got = tape.value(mlr.logits(ctx, tape.constant(x)))[0];

    // Independent evaluation, written directly from the reparameterized
    // closed form with explicit scalars.
    Vec mpx = mobius_add(-p, x);
    double na = a.norm();
    double want =
        2.0 * na * std::asinh(2.0 * mpx.dot(a) / ((1.0 - mpx.squaredNorm()) * na));
    CHECK(std::abs(got - want) < 1e-10);
  }
}

TEST_CASE("MLR logit vanishes on the hyperplane point and flips with the normal") {
  std::mt19937_64 rng(163);
  Vec p = testutil::rand_ball(rng, 5, 0.6);
  Vec a = testutil::rand_vec(rng, 5);
  Vec x = testutil::rand_ball(rng, 5, 0.7);

  auto logit = [&](const Vec& xq, const Vec& pq, const Vec& aq) {
    ParamStore ps;
    MLR mlr;
    mlr.space = SpaceTag::Hyperbolic;
    mlr.dim = 5;
    mlr.p.push_back(add_ball(ps, "p", pq));
    mlr.a.push_back(ps.add("a", Manifold::Euclidean, 5, 1, aq));
    ad::Tape tape;
    Ctx ctx(tape, ps);
    return tape.value(mlr.logits(ctx, tape.constant(xq)))[0];
  };

  CHECK(std::abs(logit(p, p, a)) < 1e-12);             // x = p_k
  double l = logit(x, p, a);
  CHECK(logit(x, p, Vec(-a)) == doctest::Approx(-l).epsilon(1e-12));
  // positive rescaling of the normal preserves the sign
  CHECK(l * logit(x, p, Vec(3.7 * a)) > 0.0);
}

TEST_CASE("euclidean MLR is 4<x - p, a>") {
  std::mt19937_64 rng(167);
  Vec p = testutil::rand_vec(rng, 5), a = testutil::rand_vec(rng, 5),
      x = testutil::rand_vec(rng, 5);
  ParamStore ps;
  MLR mlr;
  mlr.space = SpaceTag::Euclidean;
  mlr.dim = 5;
  mlr.p.push_back(ps.add("p", Manifold::Euclidean, 5, 1, p));
  mlr.a.push_back(ps.add("a", Manifold::Euclidean, 5, 1, a));
  ad::Tape tape;
  Ctx ctx(tape, ps);
  double got = tape.value(mlr.logits(ctx, tape.constant(x)))[0];
  CHECK(got == doctest::Approx(4.0 * (x - p).dot(a)).epsilon(1e-14));
}

TEST_CASE("space bridges are mutually inverse") {
  std::mt19937_64 rng(173);
  for (int trial = 0; trial < 100; ++trial) {
    int dim = 2 + static_cast<int>(rng() % 6);
    Vec x = testutil::rand_ball(rng, dim, 0.9);
    ad::Tape tape;
    ad::Vec back = tape.value(to_hyperbolic(to_euclidean(tape.constant(x))));
    CHECK((back - x).lpNorm<Eigen::Infinity>() < 1e-10);
    Vec v = testutil::rand_vec(rng, dim);
    ad::Vec back2 = tape.value(to_euclidean(to_hyperbolic(tape.constant(v))));
    CHECK((back2 - v).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("layer outputs stay in the ball") {
  std::mt19937_64 rng(179);
  for (int trial = 0; trial < 1000; ++trial) {
    int dim = 2 + static_cast<int>(rng() % 5);
    Mat M = testutil::rand_mat(rng, dim, dim, 3.0);  // aggressive weights
    Vec b = testutil::rand_ball(rng, dim, 0.95);
    Vec x = testutil::rand_ball(rng, dim, 0.999);
    ParamStore ps;
    Linear layer{SpaceTag::Hyperbolic, add_mat(ps, "M", M), add_ball(ps, "b", b), dim, dim,
                 Activation::Identity};
    ad::Tape tape;
    Ctx ctx(tape, ps);
    ad::Vec out = tape.value(layer.forward(ctx, tape.constant(x)));
    CHECK(in_ball(out));
  }
}

TEST_CASE("pool_midpoint") {
  std::mt19937_64 rng(181);
  Vec a = testutil::rand_vec(rng, 4), b = testutil::rand_vec(rng, 4);
  ad::Tape tape;
  ParamStore empty;
  Ctx ctx(tape, empty);
  SUBCASE("euclidean mean") {
    ad::Vec got = tape.value(
        pool_midpoint(ctx, SpaceTag::Euclidean, {tape.constant(a), tape.constant(b)}));
    CHECK((got - 0.5 * (a + b)).lpNorm<Eigen::Infinity>() < 1e-14);
  }
  SUBCASE("midpoint of identical points is the point") {
    Vec p = testutil::rand_ball(rng, 4, 0.6);
    ad::Vec got = tape.value(
        pool_midpoint(ctx, SpaceTag::Hyperbolic, {tape.constant(p), tape.constant(p)}));
    CHECK((got - p).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("dropout semantics") {
  std::mt19937_64 rng(191);
  Vec x = testutil::rand_ball(rng, 6, 0.7);
  ParamStore ps;
  ad::Tape tape;
  Ctx ctx(tape, ps);
  SUBCASE("identity when not training") {
    Var out = dropout(ctx, SpaceTag::Hyperbolic, tape.constant(x), 0.5);
    CHECK(tape.value(out) == x);
  }
  SUBCASE("identity at rate zero") {
    ctx.training = true;
    ctx.rng = &rng;
    Var out = dropout(ctx, SpaceTag::Hyperbolic, tape.constant(x), 0.0);
    CHECK(tape.value(out) == x);
  }
  SUBCASE("training without rng throws") {
    ctx.training = true;
    CHECK_THROWS_AS(dropout(ctx, SpaceTag::Hyperbolic, tape.constant(x), 0.5), std::logic_error);
  }
  SUBCASE("masked ball points stay in the ball") {
    ctx.training = true;
    ctx.rng = &rng;
    for (int i = 0; i < 100; ++i) {
      Vec p = testutil::rand_ball(rng, 6, 0.95);
      ad::Vec out = tape.value(dropout(ctx, SpaceTag::Hyperbolic, tape.constant(p), 0.5));
      CHECK(in_ball(out));
    }
  }
}

TEST_CASE("multilabel_predict keeps strictly positive logits") {
  ad::Vec logits(4);
  logits << 1.5, 0.0, -2.0, 0.001;
  CHECK(multilabel_predict(logits) == std::vector<int>{0, 3});
}
