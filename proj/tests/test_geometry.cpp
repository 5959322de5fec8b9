#include "doctest.h"
#include "hynn/geometry.hpp"
#include "test_util.hpp"

using namespace hynn;
using testutil::rand_ball;
using testutil::rand_mat;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("project_to_ball") {
  CHECK(project_to_ball(v2(0, 0)).isApprox(v2(0, 0)));
  Vec p = project_to_ball(v2(2, 0));
  CHECK(p[0] == doctest::Approx(0.99999).epsilon(1e-12));
  CHECK(p[1] == 0.0);
  CHECK(project_to_ball(v2(0.3, 0.4)).isApprox(v2(0.3, 0.4)));
  Vec bad = v2(1, 0);
  bad[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(project_to_ball(bad), std::invalid_argument);
}

TEST_CASE("conformal and lorentz factors") {
  CHECK(conformal_factor(v2(0, 0)) == doctest::Approx(2.0));
  CHECK(conformal_factor(v2(0.5, 0)) == doctest::Approx(8.0 / 3.0));
  CHECK(conformal_factor(v2(0.9, 0)) == doctest::Approx(2.0 / 0.19));
  CHECK(lorentz_factor(v2(0, 0)) == doctest::Approx(1.0));
  CHECK(lorentz_factor(v2(0.6, 0)) == doctest::Approx(1.25));
  CHECK(lorentz_factor(v2(0.8, 0)) == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("mobius_add basics") {
  Vec x = v2(0.3, -0.2), y = v2(0.1, 0.4);
  CHECK((mobius_add(v2(0, 0), y) - y).norm() < 1e-15);
  CHECK((mobius_add(x, v2(0, 0)) - x).norm() < 1e-15);
  // 1-D case: (a + b) / (1 + ab)
  CHECK(mobius_add(v2(0.5, 0), v2(0.5, 0))[0] == doctest::Approx(0.8).epsilon(1e-12));
  Vec z(3);
  z.setZero();
  CHECK_THROWS_AS(mobius_add(x, z), std::invalid_argument);
}

TEST_CASE("mobius_scalar_mul") {
  Vec x = v2(0.2, 0.35);
  CHECK((mobius_scalar_mul(1.0, x) - x).norm() < 1e-12);
  CHECK(mobius_scalar_mul(3.7, v2(0, 0)).norm() == 0.0);
  CHECK(mobius_scalar_mul(2.0, v2(0.5, 0))[0] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("mobius_matvec vs exp0/log0 oracle") {
  Mat I = Mat::Identity(2, 2);
  Vec x = v2(0.3, -0.4);
  CHECK((mobius_matvec(I, x) - x).norm() < 1e-12);
  CHECK(mobius_matvec(Mat::Random(3, 2), v2(0, 0)).norm() == 0.0);

  Mat d2 = 2.0 * Mat::Identity(2, 2);
  Vec got = mobius_matvec(d2, v2(0.5, 0));
  CHECK(got[0] == doctest::Approx(std::tanh(2.0 * std::atanh(0.5))).epsilon(1e-12));

  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    int n = 2 + static_cast<int>(rng() % 6);
    int m = 2 + static_cast<int>(rng() % 6);
    Vec p = rand_ball(rng, n, 0.9);
    Mat M = rand_mat(rng, m, n);
    Vec oracle = exp0(M * log0(p));
    CHECK((mobius_matvec(M, p) - oracle).norm() < 1e-12);
  }
}

TEST_CASE("mobius_pointwise") {
  Vec x = v2(0.31, -0.12);
  auto ident = [](double t) { return t; };
  CHECK((mobius_pointwise(ident, x) - x).norm() < 1e-12);
  auto th = [](double t) { return std::tanh(t); };
  CHECK(mobius_pointwise(th, v2(0, 0)).norm() < 1e-12);
  Vec got = mobius_pointwise(th, v2(0.5, 0));
  CHECK(got[0] == doctest::Approx(std::tanh(std::tanh(std::atanh(0.5)))).epsilon(1e-10));
  CHECK(got[1] == doctest::Approx(0.0));
}

TEST_CASE("distance closed forms") {
  Vec x = v2(0.3, -0.1);
  CHECK(distance(x, x) == doctest::Approx(0.0));
  CHECK(distance(v2(0, 0), v2(0.5, 0)) == doctest::Approx(2.0 * std::atanh(0.5)).epsilon(1e-12));
  // direct evaluation of the acosh form
  double expect = std::acosh(1.0 + 2.0 * 0.18 / (0.91 * 0.91));
  CHECK(distance(v2(0.3, 0), v2(0, 0.3)) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("exp0/log0") {
  CHECK(exp0(v2(0, 0)).norm() == doctest::Approx(0.0));
  CHECK(log0(v2(0.8, 0))[0] == doctest::Approx(std::atanh(0.8)).epsilon(1e-12));
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    Vec y = rand_ball(rng, 2 + static_cast<int>(rng() % 8), 0.9);
    CHECK((exp0(log0(y)) - y).norm() < 1e-10);
  }
}

TEST_CASE("exp_x/log_x") {
  std::mt19937_64 rng(13);
  Vec v = v2(0.2, -0.3);
  CHECK((exp_at(v2(0, 0), v) - exp0(v)).norm() < 1e-12);
  Vec x = v2(0.4, 0.1);
  CHECK(log_at(x, x).norm() == doctest::Approx(0.0));
  for (int i = 0; i < 200; ++i) {
    int n = 2 + static_cast<int>(rng() % 6);
    Vec base = rand_ball(rng, n, 0.7);
    Vec tv = testutil::rand_vec(rng, n, 0.5);
    CHECK((log_at(base, exp_at(base, tv)) - tv).norm() < 1e-9);
  }
}

TEST_CASE("parallel transport from origin") {
  Vec v = v2(1, 0);
  CHECK((parallel_transport_from_origin(v2(0, 0), v) - v).norm() == 0.0);
  CHECK(parallel_transport_from_origin(v2(0.5, 0), v)[0] == doctest::Approx(0.75));
  CHECK(parallel_transport_from_origin(v2(0.3, 0.2), v2(0, 0)).norm() == 0.0);
}

TEST_CASE("mobius_midpoint") {
  Vec x = v2(0.3, -0.25);
  CHECK((mobius_midpoint({x}, {1.0}) - x).norm() < 1e-12);
  CHECK(mobius_midpoint({x, -x}, {1.0, 1.0}).norm() < 1e-12);
  Vec y = v2(-0.1, 0.4);
  Vec a = mobius_midpoint({x, y}, {0.3, 0.9});
  Vec b = mobius_midpoint({x, y}, {0.3 * 7, 0.9 * 7});
  CHECK((a - b).norm() < 1e-12);
  CHECK_THROWS_AS(mobius_midpoint({x, y}, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("safe clipping") {
  CHECK(safe_tanh(100.0) == doctest::Approx(std::tanh(15.0)));
  CHECK(safe_atanh(1.0) == doctest::Approx(std::atanh(1.0 - 1e-15)));
  CHECK(safe_tanh(0.0) == 0.0);
}

TEST_CASE("property: closure over random operations") {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 1000; ++i) {
    int n = 2 + static_cast<int>(rng() % 99);
    Vec x = rand_ball(rng, n, 0.99);
    Vec y = rand_ball(rng, n, 0.99);
    CHECK(in_ball(mobius_add(x, y)));
    CHECK(in_ball(mobius_scalar_mul(3.0, x)));
    CHECK(in_ball(exp0(log0(x))));
    CHECK(in_ball(mobius_midpoint({x, y}, {0.5, 1.5})));
  }
}

TEST_CASE("property: left cancellation") {
  std::mt19937_64 rng(103);
  for (int i = 0; i < 1000; ++i) {
    int n = 2 + static_cast<int>(rng() % 10);
    Vec x = rand_ball(rng, n, 0.9);
    Vec y = rand_ball(rng, n, 0.9);
    CHECK((mobius_add(-x, mobius_add(x, y)) - y).norm() < 1e-9);
  }
}

TEST_CASE("property: identities") {
  std::mt19937_64 rng(107);
  for (int i = 0; i < 200; ++i) {
    int n = 2 + static_cast<int>(rng() % 10);
    Vec x = rand_ball(rng, n, 0.9);
    Vec z = Vec::Zero(n);
    CHECK((mobius_add(z, x) - x).norm() < 1e-12);
    CHECK((mobius_add(x, z) - x).norm() < 1e-12);
    CHECK((mobius_scalar_mul(1.0, x) - x).norm() < 1e-12);
    CHECK((mobius_matvec(Mat::Identity(n, n), x) - x).norm() < 1e-12);
  }
}

TEST_CASE("property: noncommutativity witness") {
  Vec x = v2(0.3, 0), y = v2(0, 0.4);
  Vec d = mobius_add(x, y) - mobius_add(y, x);
  CHECK(d.cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("property: distance axioms") {
  std::mt19937_64 rng(109);
  for (int i = 0; i < 1000; ++i) {
    int n = 2 + static_cast<int>(rng() % 10);
    Vec x = rand_ball(rng, n, 0.9);
    Vec y = rand_ball(rng, n, 0.9);
    Vec z = rand_ball(rng, n, 0.9);
    CHECK(distance(x, y) == doctest::Approx(distance(y, x)).epsilon(1e-9));
    CHECK(distance(x, x) < 1e-7);
    CHECK(distance(x, y) >= 0.0);
    CHECK(distance(x, z) <= distance(x, y) + distance(y, z) + 1e-9);
    // equivalence with the Mobius form
    CHECK(distance(x, y) ==
          doctest::Approx(2.0 * std::atanh(mobius_add(-x, y).norm())).epsilon(1e-9));
  }
}

TEST_CASE("property: scalar associativity") {
  std::mt19937_64 rng(113);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    int n = 2 + static_cast<int>(rng() % 10);
    Vec x = rand_ball(rng, n, 0.9);
    double r = unif(rng), s = unif(rng);
    Vec a = mobius_scalar_mul(r * s, x);
    Vec b = mobius_scalar_mul(r, mobius_scalar_mul(s, x));
    CHECK((a - b).norm() < 1e-9);
  }
}

TEST_CASE("property: small-norm limit matches scaled Euclidean distance") {
  std::mt19937_64 rng(127);
  const double eps = 1e-4;
  for (int i = 0; i < 100; ++i) {
    int n = 2 + static_cast<int>(rng() % 10);
    Vec x = rand_ball(rng, n, 0.9);
    Vec y = rand_ball(rng, n, 0.9);
    if ((x - y).norm() < 1e-3) continue;
    double ratio = distance(eps * x, eps * y) / (2.0 * eps * (x - y).norm());
    CHECK(std::abs(ratio - 1.0) < 1e-3);
  }
}
