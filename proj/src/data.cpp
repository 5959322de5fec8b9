#include "hynn/data.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace hynn {

using nlohmann::json;

Granularity granularity_from_string(const std::string& s) {
  if (s == "coarse") return Granularity::Coarse;
  if (s == "fine") return Granularity::Fine;
  if (s == "ultra") return Granularity::Ultra;
  throw std::invalid_argument("unknown granularity: " + s);
}

const char* to_string(Granularity g) {
  switch (g) {
    case Granularity::Coarse: return "coarse";
    case Granularity::Fine: return "fine";
    default: return "ultra";
  }
}

int LabelInventory::add(const std::string& label, Granularity g) {
  if (index.count(label)) throw std::invalid_argument("duplicate label: " + label);
  labels.push_back(label);
  granularity.push_back(g);
  index[label] = static_cast<int>(labels.size()) - 1;
  return index[label];
}

int LabelInventory::id_of(const std::string& label) const {
  auto it = index.find(label);
  return it == index.end() ? -1 : it->second;
}

std::vector<int> LabelInventory::ids_of_granularity(Granularity g) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (granularity[i] == g) out.push_back(i);
  return out;
}

LabelInventory LabelInventory::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open label inventory: " + path);
  LabelInventory inv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string label, gran;
    if (!(ss >> label >> gran))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 'label granularity'");
    inv.add(label, granularity_from_string(gran));
  }
  return inv;
}

void LabelInventory::save(const std::string& path) const {
  std::ofstream out(path);
  for (int i = 0; i < size(); ++i) out << labels[i] << ' ' << to_string(granularity[i]) << '\n';
}

std::vector<TypedExample> load_examples(const std::string& path, const LabelInventory& inventory,
                                        bool strict_labels) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  std::vector<TypedExample> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed JSON: " + e.what());
    }
    auto field = [&](const char* name) -> std::vector<std::string> {
      if (!rec.contains(name) || !rec[name].is_array())
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": missing or non-array field '" + name + "'");
      return rec[name].get<std::vector<std::string>>();
    };
    TypedExample ex;
    ex.mention_tokens = field("mention_span");
    if (ex.mention_tokens.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty mention_span");
    auto left = field("left_context");
    auto right = field("right_context");
    auto labels = field("labels");

    ex.context_tokens = left;
    ex.context_tokens.insert(ex.context_tokens.end(), ex.mention_tokens.begin(),
                             ex.mention_tokens.end());
    ex.context_tokens.insert(ex.context_tokens.end(), right.begin(), right.end());
    ex.span_begin = static_cast<int>(left.size());
    ex.span_end = ex.span_begin + static_cast<int>(ex.mention_tokens.size());

    std::string joined;
    for (size_t i = 0; i < ex.mention_tokens.size(); ++i) {
      if (i) joined += ' ';
      joined += ex.mention_tokens[i];
    }
    ex.mention_chars.assign(joined.begin(), joined.end());

    for (const auto& l : labels) {
      int id = inventory.id_of(l);
      if (id < 0) {
        if (strict_labels)
          throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown label '" + l +
                                   "'");
        continue;
      }
      ex.gold_labels.push_back(id);
    }
    std::sort(ex.gold_labels.begin(), ex.gold_labels.end());
    ex.gold_labels.erase(std::unique(ex.gold_labels.begin(), ex.gold_labels.end()),
                         ex.gold_labels.end());
    out.push_back(std::move(ex));
  }
  return out;
}

void save_examples(const std::string& path, const std::vector<TypedExample>& examples,
                   const LabelInventory& inventory) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset: " + path);
  for (const auto& ex : examples) {
    json rec;
    rec["mention_span"] = ex.mention_tokens;
    rec["left_context"] = std::vector<std::string>(ex.context_tokens.begin(),
                                                   ex.context_tokens.begin() + ex.span_begin);
    rec["right_context"] =
        std::vector<std::string>(ex.context_tokens.begin() + ex.span_end, ex.context_tokens.end());
    std::vector<std::string> labels;
    for (int id : ex.gold_labels) labels.push_back(inventory.labels[id]);
    rec["labels"] = labels;
    out << rec.dump() << '\n';
  }
}

std::optional<Vec> EmbeddingTable::lookup(const std::string& token,
                                          bool hyperbolic_consumer) const {
  auto it = vectors.find(token);
  if (it == vectors.end()) return std::nullopt;
  const Vec& v = it->second;
  if (space == EmbeddingSpace::Poincare)
    return hyperbolic_consumer ? v : Vec(log0(v));
  return hyperbolic_consumer ? Vec(exp0(tangent_rescale * v)) : v;
}

EmbeddingTable EmbeddingTable::load(const std::string& path, EmbeddingSpace space,
                                    double tangent_rescale) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path);
  EmbeddingTable table;
  table.space = space;
  table.tangent_rescale = tangent_rescale;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string token;
    ss >> token;
    std::vector<double> vals;
    double x;
    while (ss >> x) vals.push_back(x);
    if (vals.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": no coordinates");
    if (table.dim == 0) table.dim = static_cast<int>(vals.size());
    if (static_cast<int>(vals.size()) != table.dim)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": dimension mismatch (got " +
                               std::to_string(vals.size()) + ", expected " +
                               std::to_string(table.dim) + ")");
    Vec v = Eigen::Map<Vec>(vals.data(), vals.size());
    if (space == EmbeddingSpace::Poincare && v.norm() >= 1.0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": poincare vector with norm >= 1");
    table.vectors.emplace(std::move(token), std::move(v));
  }
  return table;
}

void EmbeddingTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write embedding file: " + path);
  out.precision(17);
  for (const auto& [token, v] : vectors) {
    out << token;
    for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << v[i];
    out << '\n';
  }
}

std::vector<std::vector<int>> make_batches(int n, int batch_size, std::mt19937_64& rng) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<int>> batches;
  for (int i = 0; i < n; i += batch_size) {
    batches.emplace_back(order.begin() + i, order.begin() + std::min(n, i + batch_size));
  }
  return batches;
}

}  // namespace hynn
