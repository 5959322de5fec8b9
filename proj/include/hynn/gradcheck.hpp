#ifndef HYNN_GRADCHECK_HPP
#define HYNN_GRADCHECK_HPP

#include "hynn/params.hpp"

#include <functional>

namespace hynn {

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_param;
  int worst_coord = -1;
};

// Five-point central finite differences against analytic gradients.
// rel err = |analytic - numeric| / max(1e-3, |analytic| + |numeric|),
// i.e. an absolute tolerance of tol * 1e-3 kicks in for tiny gradients.
// With max_coords_per_param >= 0, a random subset of coordinates per
// parameter is probed (needed for large models).
GradCheckResult finite_diff_check(const std::function<double(const ParamStore&)>& f,
                                  const ParamStore& params,
                                  const std::vector<ad::Vec>& analytic, double step,
                                  int max_coords_per_param = -1, std::uint64_t seed = 0);

struct ComponentCheck {
  std::string component;
  double max_rel_err = 0.0;
  bool pass = false;
};

// Finite-difference report over every layer kind plus the end-to-end
// multitask loss at the given dims. Large parameter tensors are probed on
// a random coordinate subset.
struct ModelConfig;  // fwd
std::vector<ComponentCheck> gradcheck_components(int d_M, int d_C, int d_S, std::uint64_t seed,
                                                 double tol = 1e-6);

}  // namespace hynn

#endif
