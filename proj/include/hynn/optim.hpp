#ifndef HYNN_OPTIM_HPP
#define HYNN_OPTIM_HPP

#include "hynn/params.hpp"

namespace hynn {

// Adam for Euclidean parameters, Riemannian Adam for ball parameters:
// the ambient gradient is rescaled by 1/lambda_x^2, moments are updated on
// the rescaled gradient, the step is retracted with exp_x, and the first
// moment is carried to the new point with the lambda-ratio transport.
struct AdamConfig {
  double learning_rate = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  double max_grad_norm = 5.0;

  // Test hooks: disabling both reduces the ball update to plain Adam.
  bool riemannian_scaling = true;
  bool exact_retraction = true;
};

class Adam {
 public:
  explicit Adam(const AdamConfig& cfg = {}) : cfg_(cfg) {}

  // grads must align with params.entries. Throws on non-finite gradients.
  void step(ParamStore& params, const std::vector<ad::Vec>& grads);

  const AdamConfig& config() const { return cfg_; }
  std::int64_t step_count() const { return step_; }

  struct State {
    ad::Vec m, v;
  };
  const std::vector<State>& state() const { return states_; }
  std::vector<State>& mutable_state() { return states_; }
  void set_step_count(std::int64_t t) { step_ = t; }

 private:
  AdamConfig cfg_;
  std::vector<State> states_;
  std::int64_t step_ = 0;
};

}  // namespace hynn

#endif
