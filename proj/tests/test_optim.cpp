#include <doctest.h>

#include "hynn/geometry_ad.hpp"
#include "hynn/optim.hpp"

#include "test_util.hpp"

using namespace hynn;

TEST_CASE("zero gradient leaves parameters unchanged and ticks the step counter") {
  ParamStore ps;
  ps.add("w", Manifold::Euclidean, 3, 1, ad::Vec::Constant(3, 1.5));
  ps.add("p", Manifold::PoincareBall, 3, 1, ad::Vec::Constant(3, 0.1));
  Adam opt;
  opt.step(ps, {ad::Vec::Zero(3), ad::Vec::Zero(3)});
  CHECK(ps.entries[0].value == ad::Vec::Constant(3, 1.5));
  CHECK(ps.entries[1].value == ad::Vec::Constant(3, 0.1));
  CHECK(opt.step_count() == 1);
  opt.step(ps, {ad::Vec::Zero(3), ad::Vec::Zero(3)});
  CHECK(opt.step_count() == 2);
}

TEST_CASE("non-finite gradient aborts the step with a diagnostic") {
  ParamStore ps;
  ps.add("w", Manifold::Euclidean, 2, 1, ad::Vec::Zero(2));
  Adam opt;
  ad::Vec bad(2);
  bad << 1.0, std::nan("");
  bool threw = false;
  try {
    opt.step(ps, {bad});
  } catch (const numeric_error& e) {
    threw = true;
    CHECK(std::string(e.what()).find("w") != std::string::npos);
  }
  CHECK(threw);
  CHECK(opt.step_count() == 0);
  CHECK(ps.entries[0].value == ad::Vec::Zero(2));
}

TEST_CASE("riemannian scaling at the origin is 1/4") {
  ParamStore ps;
  ps.add("p", Manifold::PoincareBall, 2, 1, ad::Vec::Zero(2));
  ps.add("w", Manifold::Euclidean, 2, 1, ad::Vec::Zero(2));
  AdamConfig cfg;
  cfg.max_grad_norm = 0.0;  // no clipping: isolate the scaling
  Adam opt(cfg);
  ad::Vec g(2);
  g << 0.8, -0.4;
  opt.step(ps, {g, g});
  // second moments record the (scaled) gradient squared
  ad::Vec v_ball = opt.state()[0].v;
  ad::Vec v_eu = opt.state()[1].v;
  for (int i = 0; i < 2; ++i) {
    CHECK(v_eu[i] == doctest::Approx((1 - cfg.beta2) * g[i] * g[i]).epsilon(1e-14));
    CHECK(v_ball[i] == doctest::Approx((1 - cfg.beta2) * (g[i] / 4) * (g[i] / 4)).epsilon(1e-14));
  }
}

TEST_CASE("global clip bounds the total gradient norm") {
  ParamStore ps;
  ps.add("w", Manifold::Euclidean, 2, 1, ad::Vec::Zero(2));
  AdamConfig cfg;
  cfg.max_grad_norm = 5.0;
  Adam opt(cfg);
  ad::Vec g = ad::Vec::Constant(2, 100.0);
  opt.step(ps, {g});
  // first moment was fed the clipped gradient
  double clipped = 5.0 / g.norm() * 100.0;
  CHECK(opt.state()[0].m[0] == doctest::Approx((1 - cfg.beta1) * clipped).epsilon(1e-12));
}

namespace {

// d(x, target)^2 on a 1-D ball with tape gradients.
double toy_loss_and_grad(const ad::Vec& x, const ad::Vec& target, ad::Vec& grad_out) {
  ad::Tape tape;
  ad::Var vx = tape.leaf(x);
  ad::Var d = ad::t_distance(vx, tape.constant(target));
  ad::Var loss = ad::s_mul(d, d);
  tape.backward(loss);
  grad_out = tape.grad(vx);
  return tape.scalar_value(loss);
}

}  // namespace

TEST_CASE("1-D geodesic regression converges") {
  ParamStore ps;
  ps.add("x", Manifold::PoincareBall, 1, 1, ad::Vec::Constant(1, 0.01));
  ad::Vec target = ad::Vec::Constant(1, 0.7);
  AdamConfig cfg;
  cfg.learning_rate = 0.01;
  Adam opt(cfg);
  std::vector<double> losses;
  for (int step = 0; step < 200; ++step) {
    ad::Vec g;
    losses.push_back(toy_loss_and_grad(ps.entries[0].value, target, g));
    opt.step(ps, {g});
    CHECK(in_ball(ps.entries[0].value));
  }
  CHECK(distance(ps.entries[0].value, target) < 1e-3);

  // monotone decrease over the first 50 steps, <= 2 adaptive-moment blips
  int violations = 0;
  for (int i = 1; i < 50; ++i)
    if (losses[i] > losses[i - 1] + 1e-15) ++violations;
  CHECK(violations <= 2);
}

TEST_CASE("ball parameters survive a 10k-step fuzz") {
  std::mt19937_64 rng(31);
  ParamStore ps;
  ps.add("p", Manifold::PoincareBall, 4, 1, testutil::rand_ball(rng, 4, 0.9));
  AdamConfig cfg;
  cfg.learning_rate = 0.05;  // aggressive on purpose
  Adam opt(cfg);
  std::normal_distribution<double> gauss(0.0, 5.0);
  for (int step = 0; step < 10000; ++step) {
    ad::Vec g(4);
    for (int i = 0; i < 4; ++i) g[i] = gauss(rng);
    opt.step(ps, {g});
    REQUIRE(in_ball(ps.entries[0].value));
  }
}

TEST_CASE("disabled hooks reduce the ball update to plain Adam") {
  std::mt19937_64 rng(37);
  ad::Vec x0 = testutil::rand_ball(rng, 5, 0.4);
  ParamStore ball_ps, eu_ps;
  ball_ps.add("p", Manifold::PoincareBall, 5, 1, x0);
  eu_ps.add("p", Manifold::Euclidean, 5, 1, x0);
  AdamConfig cfg;
  cfg.riemannian_scaling = false;
  cfg.exact_retraction = false;
  Adam ball_opt(cfg), eu_opt(cfg);
  for (int step = 0; step < 25; ++step) {
    ad::Vec g = testutil::rand_vec(rng, 5, 0.3);
    ball_opt.step(ball_ps, {g});
    eu_opt.step(eu_ps, {g});
    CHECK(ball_ps.entries[0].value == eu_ps.entries[0].value);
  }
}

TEST_CASE("euclidean path is textbook Adam") {
  ParamStore ps;
  ps.add("w", Manifold::Euclidean, 1, 1, ad::Vec::Constant(1, 2.0));
  AdamConfig cfg;
  cfg.max_grad_norm = 0.0;
  Adam opt(cfg);
  ad::Vec g = ad::Vec::Constant(1, 0.5);
  opt.step(ps, {g});
  double m = (1 - cfg.beta1) * 0.5, v = (1 - cfg.beta2) * 0.25;
  double mhat = m / (1 - cfg.beta1), vhat = v / (1 - cfg.beta2);
  double want = 2.0 - cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.eps);
  CHECK(ps.entries[0].value[0] == doctest::Approx(want).epsilon(1e-15));
}

TEST_CASE("moment shapes follow parameter shapes") {
  ParamStore ps;
  ps.add("m", Manifold::Euclidean, 3, 4, ad::Vec::Zero(12));
  ps.add("p", Manifold::PoincareBall, 2, 1, ad::Vec::Zero(2));
  Adam opt;
  opt.step(ps, {ad::Vec::Zero(12), ad::Vec::Zero(2)});
  CHECK(opt.state()[0].m.size() == 12);
  CHECK(opt.state()[1].v.size() == 2);
}
