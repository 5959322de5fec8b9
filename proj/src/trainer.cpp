#include "hynn/trainer.hpp"

#include <ostream>

namespace hynn {

namespace {

double run_pass(Model& model, const EmbeddingTable& table,
                const std::vector<TypedExample>& examples, const LabelInventory& inventory,
                Adam& opt, int batch_size, std::mt19937_64& rng) {
  double loss_sum = 0.0;
  long loss_count = 0;
  auto batches = make_batches(static_cast<int>(examples.size()), batch_size, rng);
  for (const auto& batch : batches) {
    ad::Tape tape;
    Ctx ctx(tape, model.params());
    ctx.training = true;
    ctx.rng = &rng;
    std::vector<ad::Var> losses;
    losses.reserve(batch.size());
    for (int idx : batch) {
      const TypedExample& ex = examples[idx];
      ad::Var logits = model.classify(ctx, ex, table);
      losses.push_back(
          multitask_loss(logits, gold_mask_of(ex.gold_labels, inventory.size()), inventory));
    }
    ad::Var loss = ad::mean_of(losses);
    loss_sum += tape.scalar_value(loss) * static_cast<double>(batch.size());
    loss_count += static_cast<long>(batch.size());
    tape.backward(loss);
    auto grads = ctx.gradients();
    opt.step(model.params(), grads);
  }
  return loss_count ? loss_sum / loss_count : 0.0;
}

}  // namespace

std::vector<std::vector<int>> predict_all(const Model& model, const EmbeddingTable& table,
                                          const std::vector<TypedExample>& examples) {
  std::vector<std::vector<int>> preds;
  preds.reserve(examples.size());
  for (const auto& ex : examples) preds.push_back(multilabel_predict(model.predict_logits(ex, table)));
  return preds;
}

GranularityScores evaluate_model(const Model& model, const EmbeddingTable& table,
                                 const std::vector<TypedExample>& examples,
                                 const LabelInventory& inventory) {
  std::vector<std::vector<int>> golds;
  golds.reserve(examples.size());
  for (const auto& ex : examples) golds.push_back(ex.gold_labels);
  return evaluate(predict_all(model, table, examples), golds, inventory);
}

TrainResult train_model(Model& model, const EmbeddingTable& table,
                        const std::vector<TypedExample>& train,
                        const std::vector<TypedExample>& crowd,
                        const std::vector<TypedExample>& dev, const LabelInventory& inventory,
                        const TrainConfig& cfg, std::ostream* log_stream) {
  TrainResult result;
  result.optimizer = Adam(cfg.adam);
  std::mt19937_64 rng(cfg.seed);
  result.best_params = model.params();

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EpochLog log;
    log.epoch = epoch;
    double loss = 0.0;
    for (int p = 0; p < cfg.schedule.main_passes; ++p)
      loss = run_pass(model, table, train, inventory, result.optimizer, cfg.batch_size, rng);
    for (int c = 0; c < cfg.schedule.crowd_cycles && !crowd.empty(); ++c)
      run_pass(model, table, crowd, inventory, result.optimizer, cfg.batch_size, rng);
    log.train_loss = loss;

    const auto& norm_set = dev.empty() ? train : dev;
    double norm_sum = 0.0;
    size_t norm_count = std::min<size_t>(norm_set.size(), 200);
    for (size_t i = 0; i < norm_count; ++i) norm_sum += model.text_vector_norm(norm_set[i], table);
    log.mean_text_norm = norm_count ? norm_sum / static_cast<double>(norm_count) : 0.0;

    if (!dev.empty()) {
      log.dev = evaluate_model(model, table, dev, inventory);
      if (log.dev.macro[0].f1 >= result.best_total_macro_f1) {
        result.best_total_macro_f1 = log.dev.macro[0].f1;
        result.best_params = model.params();
      }
    } else {
      result.best_params = model.params();
    }

    if (log_stream) {
      (*log_stream) << "epoch " << epoch << " loss " << log.train_loss << " text_norm "
                    << log.mean_text_norm;
      if (!dev.empty()) (*log_stream) << " dev_total_macro_f1 " << log.dev.macro[0].f1;
      (*log_stream) << '\n';
      log_stream->flush();
    }
    result.log.push_back(std::move(log));
  }
  return result;
}

}  // namespace hynn
