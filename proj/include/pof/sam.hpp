#pragma once

#include "pof/sgd.hpp"

namespace pof {

/// First-order sharpness-aware step: perturb all blocks by rho * g/||g||,
/// take the gradient there, descend from the unperturbed point.
struct SamConfig {
  double rho = 0.05;
  SgdConfig base;

  void validate() const;
};

struct SamStepInfo {
  double loss = 0.0;             // at the perturbed point
  double update_norm = 0.0;
  double perturbation_norm = 0.0;  // equals rho whenever ||g|| > 0
  bool perturbed = true;           // false when the ascent gradient vanished
};

SamStepInfo sam_step(ParamVector& params, const MlpSpec& spec, const Batch& batch,
                     const ModelSplit& split, const SamConfig& cfg, SgdState& state,
                     double lr_scale = 1.0);

}  // namespace pof
