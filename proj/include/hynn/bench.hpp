#ifndef HYNN_BENCH_HPP
#define HYNN_BENCH_HPP

#include "hynn/synthetic.hpp"
#include "hynn/trainer.hpp"

#include <iosfwd>

namespace hynn {

// Hyperbolic-vs-Euclidean comparison on the synthetic label tree: both
// spaces train at the same dimension budget on the same data and are
// scored per tree level.
struct BenchSpec {
  SyntheticSpec tree;
  std::vector<std::uint64_t> seeds{0};
  int epochs = 12;
  int batch_size = 32;
  double learning_rate = 0.01;
};

struct BenchLevelScore {
  int level = 0;  // 1-based; level 1 = coarse analog
  PRF hyperbolic;  // mean over seeds
  PRF euclidean;
};

struct BenchResult {
  std::vector<BenchLevelScore> levels;
  std::string csv;  // space,level,macro_p,macro_r,macro_f1 (mean over seeds)
  double hyp_deepest_f1 = 0.0;
  double eu_deepest_f1 = 0.0;
};

BenchResult run_synthetic_bench(const BenchSpec& spec, std::ostream* progress = nullptr);

}  // namespace hynn

#endif
