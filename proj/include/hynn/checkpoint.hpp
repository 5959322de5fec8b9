#ifndef HYNN_CHECKPOINT_HPP
#define HYNN_CHECKPOINT_HPP

#include "hynn/model.hpp"
#include "hynn/optim.hpp"

namespace hynn {

// Versioned binary archive: magic + JSON directory + raw little-endian
// float64 blobs. Layout documented in docs/checkpoint-format.md.
struct Checkpoint {
  ModelConfig config;
  LabelInventory inventory;
  ParamStore params;
  AdamConfig opt_config;
  std::vector<Adam::State> opt_state;
  std::int64_t opt_step = 0;
};

// Written atomically (temp file + rename).
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace hynn

#endif
