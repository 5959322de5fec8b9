#ifndef HYNN_PARAMS_HPP
#define HYNN_PARAMS_HPP

#include "hynn/tape.hpp"

#include <random>
#include <string>
#include <vector>

namespace hynn {

enum class Manifold { Euclidean, PoincareBall };

// Flat registry of trainable tensors. Matrices are stored row-major
// flattened; vectors have cols == 1. Ball-manifold entries are always
// vectors constrained to the open unit ball.
struct ParamStore {
  struct Entry {
    std::string name;
    Manifold manifold;
    int rows = 0;
    int cols = 1;
    ad::Vec value;
  };

  std::vector<Entry> entries;

  int add(std::string name, Manifold m, int rows, int cols, ad::Vec v) {
    entries.push_back(Entry{std::move(name), m, rows, cols, std::move(v)});
    return static_cast<int>(entries.size()) - 1;
  }

  int find(const std::string& name) const {
    for (size_t i = 0; i < entries.size(); ++i)
      if (entries[i].name == name) return static_cast<int>(i);
    return -1;
  }

  size_t size() const { return entries.size(); }
  size_t num_scalars() const {
    size_t n = 0;
    for (const auto& e : entries) n += e.value.size();
    return n;
  }
};

// Per-forward-pass context: caches one tape leaf per touched parameter.
struct Ctx {
  ad::Tape& tape;
  const ParamStore& ps;
  bool training = false;
  std::mt19937_64* rng = nullptr;

  Ctx(ad::Tape& t, const ParamStore& p) : tape(t), ps(p), leaves_(p.size(), ad::Var{}) {}

  ad::Var leaf(int pid) {
    if (!leaves_[pid].valid()) leaves_[pid] = tape.leaf(ps.entries[pid].value, ps.entries[pid].name.c_str());
    return leaves_[pid];
  }

  bool touched(int pid) const { return leaves_[pid].valid(); }

  // Gradients aligned with ps.entries; zero for parameters the forward
  // pass never touched. Call after tape.backward().
  std::vector<ad::Vec> gradients() const {
    std::vector<ad::Vec> out(ps.size());
    for (size_t i = 0; i < ps.size(); ++i)
      out[i] = leaves_[i].valid() ? tape.grad(leaves_[i])
                                  : ad::Vec::Zero(ps.entries[i].value.size());
    return out;
  }

 private:
  std::vector<ad::Var> leaves_;
};

}  // namespace hynn

#endif
