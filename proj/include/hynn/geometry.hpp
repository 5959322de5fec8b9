#ifndef HYNN_GEOMETRY_HPP
#define HYNN_GEOMETRY_HPP

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

// Poincare-ball kernel. All operations are pure and operate in float64.
// Curvature is fixed at c = 1; the ball is the open unit ball.

namespace hynn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct StabilityConfig {
  double eps_boundary = 1e-5;
  double eps_zero = 1e-15;
  double tanh_clip = 15.0;
  double atanh_clip = 1.0 - 1e-15;
};

inline const StabilityConfig& stability() {
  static StabilityConfig cfg;
  return cfg;
}

// Counts every Mobius-kernel invocation. Used by tests to assert that
// all-Euclidean configurations never touch hyperbolic arithmetic.
std::atomic<std::uint64_t>& geometry_op_counter();
void reset_geometry_op_counter();

double safe_tanh(double t);
double safe_atanh(double t);

// Rescales v onto the closed ball of radius 1 - eps_boundary when it
// falls outside; interior points pass through unchanged.
Vec project_to_ball(const Vec& v);

bool in_ball(const Vec& x);

double conformal_factor(const Vec& x);   // lambda_x = 2 / (1 - |x|^2)
double lorentz_factor(const Vec& x);     // gamma(x) = 1 / sqrt(1 - |x|^2)

Vec mobius_add(const Vec& x, const Vec& y);
Vec mobius_scalar_mul(double r, const Vec& x);
Vec mobius_matvec(const Mat& m, const Vec& x);

// phi applied coordinate-wise in the tangent space at the origin:
// exp0(phi(log0(x))).
template <class F>
Vec mobius_pointwise(F&& phi, const Vec& x);

double distance(const Vec& x, const Vec& y);

Vec exp0(const Vec& v);
Vec log0(const Vec& y);
Vec exp_at(const Vec& x, const Vec& v);
Vec log_at(const Vec& x, const Vec& y);

// Transport of a tangent vector at the origin to T_x: v -> (lambda_0 / lambda_x) v.
Vec parallel_transport_from_origin(const Vec& x, const Vec& v);

Vec mobius_midpoint(const std::vector<Vec>& points, const std::vector<double>& weights);

// --- inline/template definitions ---

template <class F>
Vec mobius_pointwise(F&& phi, const Vec& x) {
  Vec t = log0(x);
  for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = phi(t[i]);
  return exp0(t);
}

}  // namespace hynn

#endif
