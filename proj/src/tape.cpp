#include "hynn/tape.hpp"

#include "hynn/geometry.hpp"

#include <cmath>

namespace hynn::ad {

namespace {

void require_same(Var a, Var b, const char* op) {
  if (a.tape != b.tape) throw std::invalid_argument(std::string(op) + ": vars from different tapes");
  if (a.tape->size(a) != a.tape->size(b))
    throw std::invalid_argument(std::string(op) + ": dimension mismatch");
}

void require_scalar(Var a, const char* op) {
  if (a.tape->size(a) != 1) throw std::invalid_argument(std::string(op) + ": scalar expected");
}

}  // namespace

void Tape::backward(Var loss) {
  if (size(loss) != 1) throw std::invalid_argument("backward: loss must be scalar");
  adjoints_.assign(nodes_.size(), Vec());
  for (size_t i = 0; i < nodes_.size(); ++i) adjoints_[i] = Vec::Zero(nodes_[i].value.size());
  adjoints_[loss.id][0] = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    if (!nodes_[i].backward) continue;
    const Vec& g = adjoints_[i];
    if (!g.allFinite())
      throw numeric_error(std::string("NaN gradient at node '") + nodes_[i].op + "' (#" +
                               std::to_string(i) + ")");
    nodes_[i].backward(*this, g);
  }
}

Var add(Var a, Var b) {
  require_same(a, b, "add");
  Tape& t = *a.tape;
  return t.push(t.value(a) + t.value(b), "add", [=](Tape& tp, const Vec& g) {
    tp.accumulate(a.id, g);
    tp.accumulate(b.id, g);
  });
}

Var sub(Var a, Var b) {
  require_same(a, b, "sub");
  Tape& t = *a.tape;
  return t.push(t.value(a) - t.value(b), "sub", [=](Tape& tp, const Vec& g) {
    tp.accumulate(a.id, g);
    tp.accumulate(b.id, -g);
  });
}

Var neg(Var a) {
  Tape& t = *a.tape;
  return t.push(-t.value(a), "neg", [=](Tape& tp, const Vec& g) { tp.accumulate(a.id, -g); });
}

Var cmul(Var a, Var b) {
  require_same(a, b, "cmul");
  Tape& t = *a.tape;
  Vec va = t.value(a), vb = t.value(b);
  return t.push(va.cwiseProduct(vb), "cmul", [=](Tape& tp, const Vec& g) {
    tp.accumulate(a.id, g.cwiseProduct(vb));
    tp.accumulate(b.id, g.cwiseProduct(va));
  });
}

Var scale(Var a, Var s) {
  require_scalar(s, "scale");
  Tape& t = *a.tape;
  Vec va = t.value(a);
  double vs = t.scalar_value(s);
  return t.push(vs * va, "scale", [=](Tape& tp, const Vec& g) {
    tp.accumulate(a.id, vs * g);
    tp.accumulate(s.id, Vec::Constant(1, g.dot(va)));
  });
}

Var scale(Var a, double s) {
  Tape& t = *a.tape;
  return t.push(s * t.value(a), "scale_c",
                [=](Tape& tp, const Vec& g) { tp.accumulate(a.id, s * g); });
}

Var matvec(Var m, int rows, int cols, Var x) {
  Tape& t = *m.tape;
  if (t.size(m) != rows * cols || t.size(x) != cols)
    throw std::invalid_argument("matvec: dimension mismatch");
  Eigen::Map<const RowMat> M(t.value(m).data(), rows, cols);
  Vec vx = t.value(x);
  Vec y = M * vx;
  Vec mcopy = t.value(m);
  return t.push(std::move(y), "matvec", [=](Tape& tp, const Vec& g) {
    Eigen::Map<const RowMat> Mv(mcopy.data(), rows, cols);
    tp.accumulate(x.id, Mv.transpose() * g);
    RowMat gm = g * vx.transpose();
    tp.accumulate(m.id, Eigen::Map<const Vec>(gm.data(), rows * cols));
  });
}

Var vconcat(Var a, Var b) {
  Tape& t = *a.tape;
  int na = t.size(a), nb = t.size(b);
  Vec out(na + nb);
  out.head(na) = t.value(a);
  out.tail(nb) = t.value(b);
  return t.push(std::move(out), "vconcat", [=](Tape& tp, const Vec& g) {
    tp.accumulate(a.id, g.head(na));
    tp.accumulate(b.id, g.tail(nb));
  });
}

Var slice(Var a, int offset, int len) {
  Tape& t = *a.tape;
  int n = t.size(a);
  if (offset < 0 || offset + len > n) throw std::invalid_argument("slice: out of range");
  return t.push(t.value(a).segment(offset, len), "slice", [=](Tape& tp, const Vec& g) {
    Vec full = Vec::Zero(n);
    full.segment(offset, len) = g;
    tp.accumulate(a.id, full);
  });
}

Var sum(Var a) {
  Tape& t = *a.tape;
  int n = t.size(a);
  return t.push(Vec::Constant(1, t.value(a).sum()), "sum", [=](Tape& tp, const Vec& g) {
    tp.accumulate(a.id, Vec::Constant(n, g[0]));
  });
}

Var dot(Var a, Var b) {
  require_same(a, b, "dot");
  Tape& t = *a.tape;
  Vec va = t.value(a), vb = t.value(b);
  return t.push(Vec::Constant(1, va.dot(vb)), "dot", [=](Tape& tp, const Vec& g) {
    tp.accumulate(a.id, g[0] * vb);
    tp.accumulate(b.id, g[0] * va);
  });
}

Var sqnorm(Var a) {
  Tape& t = *a.tape;
  Vec va = t.value(a);
  return t.push(Vec::Constant(1, va.squaredNorm()), "sqnorm", [=](Tape& tp, const Vec& g) {
    tp.accumulate(a.id, 2.0 * g[0] * va);
  });
}

Var norm(Var a) {
  Tape& t = *a.tape;
  Vec va = t.value(a);
  double n = va.norm();
  const double eps = stability().eps_zero;
  bool clamped = n < eps;
  double out = clamped ? eps : n;
  return t.push(Vec::Constant(1, out), "norm", [=](Tape& tp, const Vec& g) {
    if (!clamped) tp.accumulate(a.id, (g[0] / out) * va);
  });
}

Var softmax(Var a) {
  Tape& t = *a.tape;
  Vec v = t.value(a);
  Vec e = (v.array() - v.maxCoeff()).exp();
  Vec w = e / e.sum();
  return t.push(w, "softmax", [=](Tape& tp, const Vec& g) {
    tp.accumulate(a.id, w.cwiseProduct(g - Vec::Constant(g.size(), g.dot(w))));
  });
}

Var tanh_v(Var a) {
  Tape& t = *a.tape;
  const double clip = stability().tanh_clip;
  Vec v = t.value(a);
  Vec out(v.size());
  Vec dmask(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    bool in = std::abs(v[i]) <= clip;
    out[i] = std::tanh(std::clamp(v[i], -clip, clip));
    dmask[i] = in ? 1.0 - out[i] * out[i] : 0.0;
  }
  return t.push(std::move(out), "tanh",
                [=](Tape& tp, const Vec& g) { tp.accumulate(a.id, g.cwiseProduct(dmask)); });
}

Var sigmoid_v(Var a) {
  Tape& t = *a.tape;
  Vec v = t.value(a);
  Vec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-v[i]));
  return t.push(out, "sigmoid", [=](Tape& tp, const Vec& g) {
    tp.accumulate(a.id, g.cwiseProduct(out.cwiseProduct(Vec::Ones(out.size()) - out)));
  });
}

Var s_mul(Var a, Var b) {
  require_scalar(a, "s_mul");
  require_scalar(b, "s_mul");
  return cmul(a, b);
}

Var s_div(Var a, Var b) {
  require_scalar(a, "s_div");
  require_scalar(b, "s_div");
  Tape& t = *a.tape;
  double va = t.scalar_value(a), vb = t.scalar_value(b);
  return t.push(Vec::Constant(1, va / vb), "s_div", [=](Tape& tp, const Vec& g) {
    tp.accumulate(a.id, Vec::Constant(1, g[0] / vb));
    tp.accumulate(b.id, Vec::Constant(1, -g[0] * va / (vb * vb)));
  });
}

Var s_tanh(Var a) {
  require_scalar(a, "s_tanh");
  return tanh_v(a);
}

Var s_atanh(Var a) {
  require_scalar(a, "s_atanh");
  Tape& t = *a.tape;
  const double clip = stability().atanh_clip;
  double v = t.scalar_value(a);
  bool in = std::abs(v) <= clip;
  double cv = std::clamp(v, -clip, clip);
  double d = in ? 1.0 / (1.0 - cv * cv) : 0.0;
  return t.push(Vec::Constant(1, std::atanh(cv)), "atanh", [=](Tape& tp, const Vec& g) {
    tp.accumulate(a.id, Vec::Constant(1, g[0] * d));
  });
}

Var s_asinh(Var a) {
  require_scalar(a, "s_asinh");
  Tape& t = *a.tape;
  double v = t.scalar_value(a);
  double d = 1.0 / std::sqrt(1.0 + v * v);
  return t.push(Vec::Constant(1, std::asinh(v)), "asinh", [=](Tape& tp, const Vec& g) {
    tp.accumulate(a.id, Vec::Constant(1, g[0] * d));
  });
}

Var s_sigmoid(Var a) {
  require_scalar(a, "s_sigmoid");
  return sigmoid_v(a);
}

Var softplus(Var a) {
  require_scalar(a, "softplus");
  Tape& t = *a.tape;
  double v = t.scalar_value(a);
  double out = v > 30.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
  double d = 1.0 / (1.0 + std::exp(-v));
  return t.push(Vec::Constant(1, out), "softplus", [=](Tape& tp, const Vec& g) {
    tp.accumulate(a.id, Vec::Constant(1, g[0] * d));
  });
}

Var mean_of(const std::vector<Var>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean_of: empty");
  Var acc = xs[0];
  for (size_t i = 1; i < xs.size(); ++i) acc = add(acc, xs[i]);
  return scale(acc, 1.0 / static_cast<double>(xs.size()));
}

}  // namespace hynn::ad
