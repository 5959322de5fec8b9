#include "hynn/optim.hpp"

#include "hynn/geometry.hpp"

namespace hynn {

void Adam::step(ParamStore& params, const std::vector<ad::Vec>& grads) {
  if (grads.size() != params.size())
    throw std::invalid_argument("Adam::step: gradient count mismatch");
  for (size_t i = 0; i < grads.size(); ++i) {
    if (!grads[i].allFinite())
      throw numeric_error("Adam::step: non-finite gradient for parameter '" +
                               params.entries[i].name + "'");
  }
  if (states_.empty()) {
    states_.resize(params.size());
    for (size_t i = 0; i < params.size(); ++i) {
      states_[i].m = ad::Vec::Zero(params.entries[i].value.size());
      states_[i].v = ad::Vec::Zero(params.entries[i].value.size());
    }
  }
  ++step_;

  // Global clip on the ambient gradients.
  double total_sq = 0.0;
  for (const auto& g : grads) total_sq += g.squaredNorm();
  double clip_scale = 1.0;
  double total = std::sqrt(total_sq);
  if (cfg_.max_grad_norm > 0.0 && total > cfg_.max_grad_norm)
    clip_scale = cfg_.max_grad_norm / total;

  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));

  for (size_t i = 0; i < params.size(); ++i) {
    auto& e = params.entries[i];
    auto& st = states_[i];
    ad::Vec g = clip_scale * grads[i];
    if (cfg_.weight_decay > 0.0 && e.manifold == Manifold::Euclidean)
      g += cfg_.weight_decay * e.value;

    const bool ball = e.manifold == Manifold::PoincareBall;
    if (ball && cfg_.riemannian_scaling) {
      double f = (1.0 - e.value.squaredNorm()) / 2.0;  // 1 / lambda_x
      g *= f * f;
    }

    st.m = cfg_.beta1 * st.m + (1.0 - cfg_.beta1) * g;
    st.v = cfg_.beta2 * st.v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    ad::Vec mhat = st.m / bc1;
    ad::Vec vhat = st.v / bc2;
    ad::Vec update =
        -cfg_.learning_rate *
        mhat.cwiseQuotient(vhat.cwiseSqrt() + ad::Vec::Constant(vhat.size(), cfg_.eps));

    if (ball && cfg_.exact_retraction) {
      double lam_old = conformal_factor(e.value);
      e.value = project_to_ball(exp_at(e.value, update));
      // transport the first moment to the new tangent space
      st.m *= lam_old / conformal_factor(e.value);
    } else if (ball) {
      e.value = project_to_ball(e.value + update);
    } else {
      e.value += update;
    }
  }
}

}  // namespace hynn
