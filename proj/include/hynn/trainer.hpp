#ifndef HYNN_TRAINER_HPP
#define HYNN_TRAINER_HPP

#include "hynn/metrics.hpp"
#include "hynn/model.hpp"
#include "hynn/optim.hpp"

#include <iosfwd>

namespace hynn {

struct TrainConfig {
  int epochs = 40;
  int batch_size = 32;
  EpochSchedule schedule;
  AdamConfig adam;
  std::uint64_t seed = 0;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double mean_text_norm = 0.0;
  GranularityScores dev;
};

struct TrainResult {
  std::vector<EpochLog> log;
  double best_total_macro_f1 = 0.0;
  ParamStore best_params;  // snapshot of the best-by-dev-macro-F1 epoch
  Adam optimizer;
};

// Trains in place; dev (when nonempty) drives best-checkpoint selection by
// total macro F1. crowd gets schedule.crowd_cycles extra passes per epoch.
TrainResult train_model(Model& model, const EmbeddingTable& table,
                        const std::vector<TypedExample>& train,
                        const std::vector<TypedExample>& crowd,
                        const std::vector<TypedExample>& dev, const LabelInventory& inventory,
                        const TrainConfig& cfg, std::ostream* log_stream = nullptr);

GranularityScores evaluate_model(const Model& model, const EmbeddingTable& table,
                                 const std::vector<TypedExample>& examples,
                                 const LabelInventory& inventory);

std::vector<std::vector<int>> predict_all(const Model& model, const EmbeddingTable& table,
                                          const std::vector<TypedExample>& examples);

}  // namespace hynn

#endif
