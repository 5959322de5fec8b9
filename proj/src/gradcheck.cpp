#include "hynn/gradcheck.hpp"

#include <algorithm>
#include <numeric>

namespace hynn {

GradCheckResult finite_diff_check(const std::function<double(const ParamStore&)>& f,
                                  const ParamStore& params,
                                  const std::vector<ad::Vec>& analytic, double step,
                                  int max_coords_per_param, std::uint64_t seed) {
  if (analytic.size() != params.size())
    throw std::invalid_argument("finite_diff_check: gradient count mismatch");
  GradCheckResult res;
  std::mt19937_64 rng(seed);
  ParamStore work = params;
  for (size_t p = 0; p < params.size(); ++p) {
    const int n = static_cast<int>(params.entries[p].value.size());
    std::vector<int> coords(n);
    std::iota(coords.begin(), coords.end(), 0);
    if (max_coords_per_param >= 0 && n > max_coords_per_param) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(max_coords_per_param);
    }
    for (int c : coords) {
      const double orig = work.entries[p].value[c];
      auto at = [&](double offset) {
        work.entries[p].value[c] = orig + offset;
        return f(work);
      };
      // 5-point stencil (O(step^4) truncation): tolerates the larger step
      // needed to keep roundoff below tiny gate gradients. Differences are
      // grouped so that an insensitive coordinate yields exactly zero.
      double numeric =
          (8.0 * (at(step) - at(-step)) - (at(2 * step) - at(-2 * step))) / (12 * step);
      work.entries[p].value[c] = orig;
      double a = analytic[p][c];
      // Relative error with an absolute floor: coordinates whose gradient
      // sits below the finite-difference noise floor are checked absolutely
      // (tolerance tol implies atol tol*1e-3 there).
      double rel = std::abs(a - numeric) / std::max(1e-3, std::abs(a) + std::abs(numeric));
      if (rel > res.max_rel_err) {
        res.max_rel_err = rel;
        res.worst_param = params.entries[p].name;
        res.worst_coord = c;
      }
    }
  }
  return res;
}

}  // namespace hynn
