#include "hynn/metrics.hpp"

#include "json.hpp"

#include <algorithm>
#include <sstream>

namespace hynn {

using ad::Var;

std::vector<int> gold_mask_of(const std::vector<int>& gold_labels, int K) {
  std::vector<int> mask(K, 0);
  for (int id : gold_labels) {
    if (id < 0 || id >= K) throw std::invalid_argument("gold label id out of range");
    mask[id] = 1;
  }
  return mask;
}

namespace {

// BCE restricted to a subset of label ids; mean over the subset.
Var bce_over(Var logits, const std::vector<int>& gold_mask, const std::vector<int>& ids) {
  ad::Tape& t = *logits.tape;
  std::vector<Var> terms;
  terms.reserve(ids.size());
  for (int k : ids) {
    Var z = ad::slice(logits, k, 1);
    Var term = ad::softplus(z);
    if (gold_mask[k]) term = ad::sub(term, z);
    terms.push_back(term);
  }
  (void)t;
  return ad::mean_of(terms);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

Var bce_loss(Var logits, const std::vector<int>& gold_mask) {
  int K = logits.tape->size(logits);
  if (static_cast<int>(gold_mask.size()) != K)
    throw std::invalid_argument("bce_loss: mask length mismatch");
  std::vector<int> all(K);
  for (int k = 0; k < K; ++k) all[k] = k;
  return bce_over(logits, gold_mask, all);
}

Var multitask_loss(Var logits, const std::vector<int>& gold_mask,
                   const LabelInventory& inventory) {
  ad::Tape& t = *logits.tape;
  Var total = t.scalar(0.0);
  for (Granularity g : {Granularity::Coarse, Granularity::Fine, Granularity::Ultra}) {
    std::vector<int> ids = inventory.ids_of_granularity(g);
    if (ids.empty()) continue;
    bool has_gold = std::any_of(ids.begin(), ids.end(), [&](int k) { return gold_mask[k] != 0; });
    if (!has_gold) continue;
    total = ad::add(total, bce_over(logits, gold_mask, ids));
  }
  return total;
}

GranularityScores evaluate(const std::vector<std::vector<int>>& predictions,
                           const std::vector<std::vector<int>>& golds,
                           const LabelInventory& inventory) {
  if (predictions.size() != golds.size())
    throw std::invalid_argument("evaluate: prediction/gold count mismatch");
  GranularityScores scores;

  std::vector<std::vector<int>> buckets(4);
  for (int i = 0; i < inventory.size(); ++i) {
    buckets[0].push_back(i);
    buckets[1 + static_cast<int>(inventory.granularity[i])].push_back(i);
  }

  int exact = 0;
  for (size_t e = 0; e < predictions.size(); ++e)
    if (predictions[e] == golds[e]) ++exact;
  scores.strict_accuracy =
      predictions.empty() ? 0.0 : static_cast<double>(exact) / predictions.size();

  for (int b = 0; b < 4; ++b) {
    std::vector<char> in_bucket(inventory.size(), 0);
    for (int id : buckets[b]) in_bucket[id] = 1;

    double p_sum = 0.0, r_sum = 0.0;
    int p_count = 0, r_count = 0;
    long tp = 0, fp = 0, fn = 0;
    for (size_t e = 0; e < predictions.size(); ++e) {
      std::vector<int> pred, gold;
      for (int id : predictions[e])
        if (in_bucket[id]) pred.push_back(id);
      for (int id : golds[e])
        if (in_bucket[id]) gold.push_back(id);
      std::vector<int> inter;
      std::set_intersection(pred.begin(), pred.end(), gold.begin(), gold.end(),
                            std::back_inserter(inter));
      if (!pred.empty()) {
        p_sum += static_cast<double>(inter.size()) / pred.size();
        ++p_count;
      }
      if (!gold.empty()) {
        r_sum += static_cast<double>(inter.size()) / gold.size();
        ++r_count;
      }
      tp += static_cast<long>(inter.size());
      fp += static_cast<long>(pred.size() - inter.size());
      fn += static_cast<long>(gold.size() - inter.size());
    }
    PRF macro;
    macro.precision = p_count ? p_sum / p_count : 0.0;
    macro.recall = r_count ? r_sum / r_count : 0.0;
    macro.f1 = harmonic(macro.precision, macro.recall);
    PRF micro;
    micro.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    micro.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    micro.f1 = harmonic(micro.precision, micro.recall);
    scores.macro[b] = macro;
    scores.micro[b] = micro;
  }
  return scores;
}

PRF macro_prf_restricted(const std::vector<std::vector<int>>& predictions,
                         const std::vector<std::vector<int>>& golds,
                         const std::vector<int>& label_ids, int K) {
  std::vector<char> in_bucket(K, 0);
  for (int id : label_ids) in_bucket[id] = 1;
  double p_sum = 0.0, r_sum = 0.0;
  int p_count = 0, r_count = 0;
  for (size_t e = 0; e < predictions.size(); ++e) {
    std::vector<int> pred, gold;
    for (int id : predictions[e])
      if (in_bucket[id]) pred.push_back(id);
    for (int id : golds[e])
      if (in_bucket[id]) gold.push_back(id);
    std::vector<int> inter;
    std::set_intersection(pred.begin(), pred.end(), gold.begin(), gold.end(),
                          std::back_inserter(inter));
    if (!pred.empty()) {
      p_sum += static_cast<double>(inter.size()) / pred.size();
      ++p_count;
    }
    if (!gold.empty()) {
      r_sum += static_cast<double>(inter.size()) / gold.size();
      ++r_count;
    }
  }
  PRF out;
  out.precision = p_count ? p_sum / p_count : 0.0;
  out.recall = r_count ? r_sum / r_count : 0.0;
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

std::string format_report(const GranularityScores& s) {
  std::ostringstream out;
  out.precision(4);
  out << std::fixed;
  for (int b = 0; b < 4; ++b) {
    out << GranularityScores::bucket_names[b] << "  macro P " << s.macro[b].precision << "  R "
        << s.macro[b].recall << "  F1 " << s.macro[b].f1 << "  |  micro P " << s.micro[b].precision
        << "  R " << s.micro[b].recall << "  F1 " << s.micro[b].f1 << '\n';
  }
  out << "strict_accuracy " << s.strict_accuracy << '\n';
  return out.str();
}

std::string to_json_report(const GranularityScores& s) {
  nlohmann::json j;
  for (int b = 0; b < 4; ++b) {
    const char* name = GranularityScores::bucket_names[b];
    j[name]["macro"] = {{"precision", s.macro[b].precision},
                        {"recall", s.macro[b].recall},
                        {"f1", s.macro[b].f1}};
    j[name]["micro"] = {{"precision", s.micro[b].precision},
                        {"recall", s.micro[b].recall},
                        {"f1", s.micro[b].f1}};
  }
  j["strict_accuracy"] = s.strict_accuracy;
  return j.dump(2);
}

}  // namespace hynn
