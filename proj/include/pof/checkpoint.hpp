#pragma once

#include <filesystem>
#include <string>

#include "pof/mlp.hpp"
#include "pof/param_vector.hpp"

namespace pof {

/// Self-contained model snapshot: architecture, split, flat parameter values
/// and a label describing the RNG lineage that produced it. The on-disk
/// layout is little-endian and documented in docs/formats.md; save followed
/// by load restores `params.values` bit-exactly.
struct Checkpoint {
  MlpSpec spec;
  ModelSplit split;
  ParamVector params;
  std::string rng_label;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pof
