#ifndef HYNN_METRICS_HPP
#define HYNN_METRICS_HPP

#include "hynn/data.hpp"
#include "hynn/tape.hpp"

namespace hynn {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct GranularityScores {
  // indexed 0=total, 1=coarse, 2=fine, 3=ultra
  PRF macro[4];
  PRF micro[4];
  double strict_accuracy = 0.0;  // exact set match over all labels

  static constexpr const char* bucket_names[4] = {"total", "coarse", "fine", "ultra"};
};

// Mean over labels of the stable binary cross-entropy
// softplus(z) - y z. gold is a 0/1 mask aligned with logits.
ad::Var bce_loss(ad::Var logits, const std::vector<int>& gold_mask);

// Sum of the partition-restricted BCE over coarse/fine/ultra, where a
// partition contributes only when the example has a gold label in it.
ad::Var multitask_loss(ad::Var logits, const std::vector<int>& gold_mask,
                       const LabelInventory& inventory);

std::vector<int> gold_mask_of(const std::vector<int>& gold_labels, int K);

GranularityScores evaluate(const std::vector<std::vector<int>>& predictions,
                           const std::vector<std::vector<int>>& golds,
                           const LabelInventory& inventory);

// Macro P/R/F1 with predictions and golds restricted to a label subset.
PRF macro_prf_restricted(const std::vector<std::vector<int>>& predictions,
                         const std::vector<std::vector<int>>& golds,
                         const std::vector<int>& label_ids, int K);

std::string format_report(const GranularityScores& s);
std::string to_json_report(const GranularityScores& s);

}  // namespace hynn

#endif
