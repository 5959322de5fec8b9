#include "hynn/synthetic.hpp"

#include <algorithm>

namespace hynn {

namespace {

Vec unit(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
  return v / std::max(v.norm(), 1e-12);
}

}  // namespace

SyntheticData generate_tree_data(const SyntheticSpec& spec) {
  if (spec.depth < 2 || spec.branching < 2)
    throw std::invalid_argument("synthetic tree needs depth >= 2 and branching >= 2");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SyntheticData data;
  data.table.space = EmbeddingSpace::Poincare;
  data.table.dim = spec.dim;

  // level -> node index -> label id / anchor
  std::vector<std::vector<int>> label_ids(spec.depth);
  std::vector<std::vector<Vec>> dirs(spec.depth), anchors(spec.depth);
  for (int level = 0; level < spec.depth; ++level) {
    int count = 1;
    for (int l = 0; l <= level; ++l) count *= spec.branching;
    double radius = 0.8 * static_cast<double>(level + 1) / spec.depth;
    Granularity g = level == 0 ? Granularity::Coarse
                               : (level == 1 ? Granularity::Fine : Granularity::Ultra);
    data.labels_by_level.emplace_back();
    for (int i = 0; i < count; ++i) {
      Vec dir;
      if (level == 0) {
        dir = unit(rng, spec.dim);
      } else {
        Vec perturb(spec.dim);
        for (int d = 0; d < spec.dim; ++d) perturb[d] = gauss(rng);
        dir = dirs[level - 1][i / spec.branching] + 0.6 * perturb;
        dir /= std::max(dir.norm(), 1e-12);
      }
      dirs[level].push_back(dir);
      anchors[level].push_back(radius * dir);
      int id = data.inventory.add("L" + std::to_string(level + 1) + "_" + std::to_string(i), g);
      label_ids[level].push_back(id);
      data.labels_by_level[level].push_back(id);
    }
  }

  long token_counter = 0;
  auto make_token = [&](const Vec& anchor, double noise) {
    Vec t = log0(anchor);
    for (int d = 0; d < spec.dim; ++d) t[d] += noise * gauss(rng);
    std::string name = "w" + std::to_string(token_counter++);
    data.table.vectors.emplace(name, exp0(t));
    return name;
  };

  int n_leaves = static_cast<int>(label_ids[spec.depth - 1].size());
  auto make_example = [&]() {
    std::uniform_int_distribution<int> pick(0, n_leaves - 1);
    int leaf = pick(rng);
    TypedExample ex;
    // ancestors from the root down
    std::vector<int> path(spec.depth);
    int node = leaf;
    for (int level = spec.depth - 1; level >= 0; --level) {
      path[level] = node;
      node /= spec.branching;
    }
    for (int level = 0; level < spec.depth; ++level)
      ex.gold_labels.push_back(label_ids[level][path[level]]);
    std::sort(ex.gold_labels.begin(), ex.gold_labels.end());

    ex.mention_tokens = {make_token(anchors[spec.depth - 1][leaf], spec.mention_noise),
                         make_token(anchors[spec.depth - 1][leaf], spec.mention_noise)};
    std::vector<std::string> left, right;
    for (int level = 0; level < spec.depth - 1; ++level) {
      left.push_back(make_token(anchors[level][path[level]], spec.context_noise));
      right.push_back(make_token(anchors[level][path[level]], spec.context_noise));
    }
    ex.context_tokens = left;
    ex.span_begin = static_cast<int>(left.size());
    ex.context_tokens.insert(ex.context_tokens.end(), ex.mention_tokens.begin(),
                             ex.mention_tokens.end());
    ex.span_end = static_cast<int>(ex.context_tokens.size());
    ex.context_tokens.insert(ex.context_tokens.end(), right.begin(), right.end());
    std::string joined = ex.mention_tokens[0] + " " + ex.mention_tokens[1];
    ex.mention_chars.assign(joined.begin(), joined.end());
    return ex;
  };

  for (int i = 0; i < spec.n_train; ++i) data.train.push_back(make_example());
  for (int i = 0; i < spec.n_test; ++i) data.test.push_back(make_example());
  return data;
}

}  // namespace hynn
