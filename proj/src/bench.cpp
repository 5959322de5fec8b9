#include "hynn/bench.hpp"

#include <ostream>
#include <sstream>

namespace hynn {

namespace {

std::vector<PRF> score_by_level(const Model& model, const SyntheticData& data) {
  auto preds = predict_all(model, data.table, data.test);
  std::vector<std::vector<int>> golds;
  golds.reserve(data.test.size());
  for (const auto& ex : data.test) golds.push_back(ex.gold_labels);
  std::vector<PRF> out;
  for (const auto& level_ids : data.labels_by_level)
    out.push_back(macro_prf_restricted(preds, golds, level_ids, data.inventory.size()));
  return out;
}

std::vector<PRF> run_one(const SyntheticData& data, SpaceTag space, const BenchSpec& spec,
                         std::uint64_t seed) {
  ModelConfig mcfg;
  mcfg.d_M = mcfg.d_C = mcfg.d_S = spec.tree.dim;
  mcfg.embed_dim = spec.tree.dim;
  mcfg.K = data.inventory.size();
  mcfg.char_vocab = 64;
  mcfg.dropout_input = 0.0;
  mcfg.dropout_concat = 0.0;
  mcfg.spaces = ComponentSpaceConfig{space, space, space, space};
  Model model(mcfg, seed);

  TrainConfig tcfg;
  tcfg.epochs = spec.epochs;
  tcfg.batch_size = spec.batch_size;
  tcfg.schedule.crowd_cycles = 0;
  tcfg.adam.learning_rate = spec.learning_rate;
  tcfg.seed = seed;
  train_model(model, data.table, data.train, {}, {}, data.inventory, tcfg);
  return score_by_level(model, data);
}

}  // namespace

BenchResult run_synthetic_bench(const BenchSpec& spec, std::ostream* progress) {
  int depth = spec.tree.depth;
  std::vector<PRF> hy(depth), eu(depth);
  for (std::uint64_t seed : spec.seeds) {
    SyntheticSpec tspec = spec.tree;
    tspec.seed = seed;
    SyntheticData data = generate_tree_data(tspec);
    auto hy_s = run_one(data, SpaceTag::Hyperbolic, spec, seed);
    auto eu_s = run_one(data, SpaceTag::Euclidean, spec, seed);
    for (int l = 0; l < depth; ++l) {
      hy[l].precision += hy_s[l].precision; hy[l].recall += hy_s[l].recall; hy[l].f1 += hy_s[l].f1;
      eu[l].precision += eu_s[l].precision; eu[l].recall += eu_s[l].recall; eu[l].f1 += eu_s[l].f1;
    }
    if (progress)
      (*progress) << "seed " << seed << " hyperbolic_deepest_f1 " << hy_s[depth - 1].f1
                  << " euclidean_deepest_f1 " << eu_s[depth - 1].f1 << '\n';
  }
  double n = static_cast<double>(spec.seeds.size());
  BenchResult result;
  std::ostringstream csv;
  csv << "space,level,macro_p,macro_r,macro_f1\n";
  for (int l = 0; l < depth; ++l) {
    BenchLevelScore score;
    score.level = l + 1;
    score.hyperbolic = {hy[l].precision / n, hy[l].recall / n, hy[l].f1 / n};
    score.euclidean = {eu[l].precision / n, eu[l].recall / n, eu[l].f1 / n};
    result.levels.push_back(score);
    csv << "hyperbolic," << score.level << ',' << score.hyperbolic.precision << ','
        << score.hyperbolic.recall << ',' << score.hyperbolic.f1 << '\n';
    csv << "euclidean," << score.level << ',' << score.euclidean.precision << ','
        << score.euclidean.recall << ',' << score.euclidean.f1 << '\n';
  }
  result.csv = csv.str();
  result.hyp_deepest_f1 = result.levels.back().hyperbolic.f1;
  result.eu_deepest_f1 = result.levels.back().euclidean.f1;
  return result;
}

}  // namespace hynn
