#ifndef HYNN_TAPE_HPP
#define HYNN_TAPE_HPP

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

// Reverse-mode tape over dense float64 vectors. Scalars are size-1 vectors.
// One tape per training step; a tape is confined to one thread.

namespace hynn {

// Non-finite values and failed numeric invariants; maps to exit code 3
// at the CLI boundary.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hynn

namespace hynn::ad {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
// Matrix values live on the tape as row-major flattened vectors.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Tape;

struct Var {
  Tape* tape = nullptr;
  int id = -1;
  bool valid() const { return tape != nullptr; }
};

class Tape {
 public:
  struct Node {
    Vec value;
    const char* op;
    // Accumulates into input adjoints given this node's adjoint. Null for leaves.
    std::function<void(Tape&, const Vec&)> backward;
  };

  Var leaf(const Vec& v, const char* name = "leaf") { return push(v, name, nullptr); }
  Var constant(const Vec& v) { return push(v, "const", nullptr); }
  Var scalar(double s) { return constant(Vec::Constant(1, s)); }

  const Vec& value(Var v) const { return nodes_[v.id].value; }
  double scalar_value(Var v) const { return nodes_[v.id].value[0]; }
  int size(Var v) const { return static_cast<int>(nodes_[v.id].value.size()); }

  // Seeds the scalar loss with 1 and sweeps the tape in reverse.
  // Gradients of leaves are read with grad() afterwards.
  void backward(Var loss);

  const Vec& grad(Var v) const { return adjoints_[v.id]; }

  Var push(Vec value, const char* op, std::function<void(Tape&, const Vec&)> bw) {
    if (!value.allFinite())
      throw numeric_error(std::string("non-finite value produced by node '") + op +
                               "' (#" + std::to_string(nodes_.size()) + ")");
    nodes_.push_back(Node{std::move(value), op, std::move(bw)});
    return Var{this, static_cast<int>(nodes_.size()) - 1};
  }

  void accumulate(int id, const Vec& g) { adjoints_[id] += g; }

  size_t num_nodes() const { return nodes_.size(); }

 private:
  std::vector<Node> nodes_;
  std::vector<Vec> adjoints_;
};

// --- primitive ops ---

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var neg(Var a);
Var cmul(Var a, Var b);                  // elementwise product (equal sizes)
Var scale(Var a, Var s);                 // vector * scalar
Var scale(Var a, double s);
Var matvec(Var m, int rows, int cols, Var x);  // m is row-major flattened
Var vconcat(Var a, Var b);
Var slice(Var a, int offset, int len);
Var sum(Var a);                          // -> scalar
Var dot(Var a, Var b);                   // -> scalar
Var sqnorm(Var a);                       // -> scalar
Var norm(Var a);                         // -> scalar, clamped below at eps_zero
Var softmax(Var a);
Var tanh_v(Var a);                       // elementwise, clipped per StabilityConfig
Var sigmoid_v(Var a);

// scalar-only ops (size-1 inputs)
Var s_mul(Var a, Var b);
Var s_div(Var a, Var b);
Var s_tanh(Var a);                       // clipped; zero gradient in the clipped region
Var s_atanh(Var a);                      // clipped argument
Var s_asinh(Var a);
Var s_sigmoid(Var a);
Var softplus(Var a);                     // log(1 + e^x), overflow-safe

Var mean_of(const std::vector<Var>& xs);  // scalar mean of scalars

}  // namespace hynn::ad

#endif
