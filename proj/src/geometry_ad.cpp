#include "hynn/geometry_ad.hpp"

namespace hynn::ad {

namespace {

Var count(Var v) {
  geometry_op_counter()++;
  return v;
}

}  // namespace

Var t_project(Var x) {
  Tape& t = *x.tape;
  const Vec& v = t.value(x);
  const double max_norm = 1.0 - stability().eps_boundary;
  double n = v.norm();
  if (n <= max_norm) return x;
  double c = max_norm / n;
  Vec u = v / n;
  return t.push(c * v, "project", [=](Tape& tp, const Vec& g) {
    tp.accumulate(x.id, c * (g - u * u.dot(g)));
  });
}

Var t_mobius_add(Var x, Var y) {
  Tape& t = *x.tape;
  geometry_op_counter()++;
  Var xy = dot(x, y);
  Var x2 = sqnorm(x);
  Var y2 = sqnorm(y);
  Var one = t.scalar(1.0);
  Var two_xy = scale(xy, 2.0);
  Var denom = add(add(one, two_xy), s_mul(x2, y2));
  Var num = add(scale(x, add(add(one, two_xy), y2)), scale(y, sub(one, x2)));
  return t_project(scale(num, s_div(one, denom)));
}

Var t_mobius_scalar_mul(Var r, Var x) {
  Tape& t = *x.tape;
  geometry_op_counter()++;
  if (t.value(x).norm() < stability().eps_zero) return t.constant(Vec::Zero(t.size(x)));
  Var n = norm(x);
  Var s = s_div(s_tanh(s_mul(r, s_atanh(n))), n);
  return t_project(scale(x, s));
}

Var t_mobius_scalar_mul(double r, Var x) {
  return t_mobius_scalar_mul(x.tape->scalar(r), x);
}

Var t_mobius_matvec(Var m, int rows, int cols, Var x) {
  Tape& t = *x.tape;
  geometry_op_counter()++;
  Var mx = matvec(m, rows, cols, x);
  if (t.value(x).norm() < stability().eps_zero || t.value(mx).norm() < stability().eps_zero)
    return t.constant(Vec::Zero(rows));
  Var nx = norm(x);
  Var nmx = norm(mx);
  Var s = s_div(s_tanh(s_mul(s_div(nmx, nx), s_atanh(nx))), nmx);
  return t_project(scale(mx, s));
}

Var t_exp0(Var v) {
  Tape& t = *v.tape;
  geometry_op_counter()++;
  Var n = norm(v);
  return t_project(scale(v, s_div(s_tanh(n), n)));
}

Var t_log0(Var y) {
  Tape& t = *y.tape;
  geometry_op_counter()++;
  Var n = norm(y);
  return scale(y, s_div(s_atanh(n), n));
}

Var t_exp_at(Var x, Var v) {
  Tape& t = *x.tape;
  geometry_op_counter()++;
  Var one = t.scalar(1.0);
  Var lam_half = s_div(one, sub(one, sqnorm(x)));  // lambda_x / 2
  Var n = norm(v);
  Var step = scale(v, s_div(s_tanh(s_mul(lam_half, n)), n));
  return t_mobius_add(x, step);
}

Var t_log_at(Var x, Var y) {
  Tape& t = *x.tape;
  geometry_op_counter()++;
  Var d = t_mobius_add(neg(x), y);
  if (t.value(d).norm() < stability().eps_zero) return t.constant(Vec::Zero(t.size(x)));
  Var one = t.scalar(1.0);
  Var inv_lam_half = sub(one, sqnorm(x));  // 2 / lambda_x
  Var n = norm(d);
  return scale(d, s_mul(inv_lam_half, s_div(s_atanh(n), n)));
}

Var t_distance(Var x, Var y) {
  geometry_op_counter()++;
  Var d = t_mobius_add(neg(x), y);
  return scale(s_atanh(norm(d)), 2.0);
}

Var t_transport_from_origin(Var x, Var v) {
  Tape& t = *x.tape;
  geometry_op_counter()++;
  Var one = t.scalar(1.0);
  return scale(v, sub(one, sqnorm(x)));
}

Var t_tanh_pointwise(Var x) {
  geometry_op_counter()++;
  return t_exp0(tanh_v(t_log0(x)));
}

Var t_mobius_diag(Var z, Var v) {
  geometry_op_counter()++;
  return t_exp0(cmul(z, t_log0(v)));
}

Var t_mobius_midpoint(const std::vector<Var>& points, Var weights) {
  if (points.empty()) throw std::invalid_argument("t_mobius_midpoint: empty");
  Tape& t = *weights.tape;
  if (t.size(weights) != static_cast<int>(points.size()))
    throw std::invalid_argument("t_mobius_midpoint: length mismatch");
  geometry_op_counter()++;
  Var one = t.scalar(1.0);
  Var half = t.scalar(0.5);
  Var num{};
  Var den{};
  for (size_t i = 0; i < points.size(); ++i) {
    Var w = slice(weights, static_cast<int>(i), 1);
    Var g2 = s_div(one, sub(one, sqnorm(points[i])));
    Var term = scale(points[i], s_mul(w, g2));
    Var dterm = s_mul(w, sub(g2, half));
    num = i == 0 ? term : add(num, term);
    den = i == 0 ? dterm : add(den, dterm);
  }
  return t_mobius_scalar_mul(0.5, scale(num, s_div(one, den)));
}

}  // namespace hynn::ad
