#include "hynn/geometry.hpp"

namespace hynn {

namespace {

double safe_norm(const Vec& v) {
  double n = v.norm();
  return n < stability().eps_zero ? stability().eps_zero : n;
}

void check_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw std::invalid_argument(std::string("non-finite input to ") + what);
}

}  // namespace

std::atomic<std::uint64_t>& geometry_op_counter() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}

void reset_geometry_op_counter() { geometry_op_counter().store(0); }

double safe_tanh(double t) {
  const double c = stability().tanh_clip;
  return std::tanh(std::clamp(t, -c, c));
}

double safe_atanh(double t) {
  const double c = stability().atanh_clip;
  return std::atanh(std::clamp(t, -c, c));
}

Vec project_to_ball(const Vec& v) {
  check_finite(v, "project_to_ball");
  const double max_norm = 1.0 - stability().eps_boundary;
  double n = v.norm();
  if (n <= max_norm) return v;
  return v * (max_norm / n);
}

bool in_ball(const Vec& x) {
  return x.allFinite() && x.norm() <= 1.0 - stability().eps_boundary + 1e-12;
}

double conformal_factor(const Vec& x) { return 2.0 / (1.0 - x.squaredNorm()); }

double lorentz_factor(const Vec& x) { return 1.0 / std::sqrt(1.0 - x.squaredNorm()); }

Vec mobius_add(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("mobius_add: dimension mismatch");
  geometry_op_counter()++;
  double xy = x.dot(y);
  double x2 = x.squaredNorm();
  double y2 = y.squaredNorm();
  double denom = 1.0 + 2.0 * xy + x2 * y2;
  Vec out = ((1.0 + 2.0 * xy + y2) * x + (1.0 - x2) * y) / denom;
  return project_to_ball(out);
}

Vec mobius_scalar_mul(double r, const Vec& x) {
  geometry_op_counter()++;
  double n = x.norm();
  if (n < stability().eps_zero) return Vec::Zero(x.size());
  Vec out = safe_tanh(r * safe_atanh(n)) * x / n;
  return project_to_ball(out);
}

Vec mobius_matvec(const Mat& m, const Vec& x) {
  geometry_op_counter()++;
  double nx = x.norm();
  Vec mx = m * x;
  double nmx = mx.norm();
  if (nx < stability().eps_zero || nmx < stability().eps_zero)
    return Vec::Zero(m.rows());
  Vec out = safe_tanh(nmx / nx * safe_atanh(nx)) * mx / nmx;
  return project_to_ball(out);
}

double distance(const Vec& x, const Vec& y) {
  geometry_op_counter()++;
  double arg = 1.0 + 2.0 * (x - y).squaredNorm() /
                         ((1.0 - x.squaredNorm()) * (1.0 - y.squaredNorm()));
  return std::acosh(std::max(arg, 1.0));
}

Vec exp0(const Vec& v) {
  geometry_op_counter()++;
  double n = safe_norm(v);
  return project_to_ball(Vec(safe_tanh(n) * v / n));
}

Vec log0(const Vec& y) {
  geometry_op_counter()++;
  double n = safe_norm(y);
  return safe_atanh(n) * y / n;
}

Vec exp_at(const Vec& x, const Vec& v) {
  geometry_op_counter()++;
  double n = safe_norm(v);
  Vec step = safe_tanh(conformal_factor(x) * n / 2.0) * v / n;
  return mobius_add(x, step);
}

Vec log_at(const Vec& x, const Vec& y) {
  geometry_op_counter()++;
  Vec d = mobius_add(-x, y);
  double n = d.norm();
  if (n < stability().eps_zero) return Vec::Zero(x.size());
  return (2.0 / conformal_factor(x)) * safe_atanh(n) * d / n;
}

Vec parallel_transport_from_origin(const Vec& x, const Vec& v) {
  geometry_op_counter()++;
  return (1.0 - x.squaredNorm()) * v;
}

Vec mobius_midpoint(const std::vector<Vec>& points, const std::vector<double>& weights) {
  if (points.empty() || points.size() != weights.size())
    throw std::invalid_argument("mobius_midpoint: bad lengths");
  double wsum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("mobius_midpoint: negative weight");
    wsum += w;
  }
  if (wsum <= 0.0) throw std::invalid_argument("mobius_midpoint: all weights zero");
  geometry_op_counter()++;
  Vec num = Vec::Zero(points[0].size());
  double den = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    double g2 = 1.0 / (1.0 - points[i].squaredNorm());
    num += weights[i] * g2 * points[i];
    den += weights[i] * (g2 - 0.5);
  }
  return mobius_scalar_mul(0.5, num / den);
}

}  // namespace hynn
