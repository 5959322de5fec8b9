#ifndef HYNN_DATA_HPP
#define HYNN_DATA_HPP

#include "hynn/geometry.hpp"

#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

namespace hynn {

enum class Granularity { Coarse, Fine, Ultra };

Granularity granularity_from_string(const std::string& s);
const char* to_string(Granularity g);

// Ordered label set with a total coarse/fine/ultra partition.
struct LabelInventory {
  std::vector<std::string> labels;
  std::vector<Granularity> granularity;  // aligned with labels
  std::unordered_map<std::string, int> index;

  int add(const std::string& label, Granularity g);
  int id_of(const std::string& label) const;  // -1 if unknown
  int size() const { return static_cast<int>(labels.size()); }
  std::vector<int> ids_of_granularity(Granularity g) const;

  static LabelInventory load(const std::string& path);
  void save(const std::string& path) const;
};

struct TypedExample {
  std::vector<std::string> mention_tokens;
  std::vector<char> mention_chars;
  std::vector<std::string> context_tokens;  // left + mention + right
  int span_begin = 0;                       // mention offsets inside context_tokens
  int span_end = 0;                         // exclusive
  std::vector<int> gold_labels;             // dense ids into the inventory
};

// Line-delimited JSON records with fields mention_span, left_context,
// right_context, labels (all arrays of strings). Rejects records with an
// empty mention or, in strict mode, labels missing from the inventory.
std::vector<TypedExample> load_examples(const std::string& path, const LabelInventory& inventory,
                                        bool strict_labels = true);
void save_examples(const std::string& path, const std::vector<TypedExample>& examples,
                   const LabelInventory& inventory);

enum class EmbeddingSpace { Poincare, Euclidean };

// Frozen token embedding table. Consumption converts between spaces:
// a Poincare table feeding a Euclidean model goes through log0; a
// Euclidean table feeding a hyperbolic model is rescaled in the tangent
// space and pushed through exp0.
struct EmbeddingTable {
  std::unordered_map<std::string, Vec> vectors;
  EmbeddingSpace space = EmbeddingSpace::Poincare;
  double tangent_rescale = 1.0;
  int dim = 0;

  bool contains(const std::string& token) const { return vectors.count(token) > 0; }
  // Returns the vector as consumed by a model of the requested space, or
  // nullopt for out-of-vocabulary tokens.
  std::optional<Vec> lookup(const std::string& token, bool hyperbolic_consumer) const;

  static EmbeddingTable load(const std::string& path, EmbeddingSpace space,
                             double tangent_rescale = 1.0);
  void save(const std::string& path) const;
};

struct EpochSchedule {
  int main_passes = 1;
  int crowd_cycles = 5;
};

// Deterministic shuffled batching.
std::vector<std::vector<int>> make_batches(int n, int batch_size, std::mt19937_64& rng);

}  // namespace hynn

#endif
