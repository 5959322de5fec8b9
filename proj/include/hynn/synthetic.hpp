#ifndef HYNN_SYNTHETIC_HPP
#define HYNN_SYNTHETIC_HPP

#include "hynn/data.hpp"

namespace hynn {

// Balanced label tree for the hyperbolic-vs-Euclidean benchmark. Labels
// live on levels 1..depth (branching^level per level); every example is a
// leaf plus all of its ancestors, with token features drawn around
// per-label anchor points in the ball.
struct SyntheticSpec {
  int depth = 4;
  int branching = 3;
  int dim = 4;
  int n_train = 2000;
  int n_test = 500;
  double mention_noise = 0.05;
  double context_noise = 0.08;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  LabelInventory inventory;
  EmbeddingTable table;  // Poincare-space token vectors
  std::vector<TypedExample> train;
  std::vector<TypedExample> test;
  std::vector<std::vector<int>> labels_by_level;  // index 0 = level 1
};

SyntheticData generate_tree_data(const SyntheticSpec& spec);

}  // namespace hynn

#endif
