#pragma once

#include <vector>

#include "pof/mlp.hpp"
#include "pof/param_vector.hpp"

namespace pof {

/// Multiply the base learning rate by `multiplier` from `epoch` onward.
struct LrMilestone {
  int epoch = 0;
  double multiplier = 1.0;
};

struct SgdConfig {
  double lr = 0.1;
  double momentum = 0.9;
  bool nesterov = true;
  double weight_decay = 5e-4;
  std::vector<LrMilestone> schedule;

  void validate() const;
};

/// Cumulative schedule multiplier in effect at `epoch` (0-based).
double lr_scale_at(const SgdConfig& cfg, int epoch);

/// Momentum buffer, full parameter length (zeros outside the driven blocks).
struct SgdState {
  Vector velocity;
};

SgdState make_sgd_state(const ParamVector& params);

/// Momentum/Nesterov update with L2 weight decay folded into the gradient,
/// restricted to the blocks picked by `wrt`. Returns the l2 norm of the
/// applied parameter change. Shared by every trainer so that equivalent
/// updates are bit-identical.
double apply_sgd_update(ParamVector& params, const Vector& gradient, const ModelSplit& split,
                        const SgdConfig& cfg, SgdState& state, BlockSelector wrt,
                        double lr_scale = 1.0);

struct SgdStepInfo {
  double loss = 0.0;
  double update_norm = 0.0;
};

/// One mini-batch step of momentum SGD.
SgdStepInfo sgd_step(ParamVector& params, const MlpSpec& spec, const Batch& batch,
                     const ModelSplit& split, const SgdConfig& cfg, SgdState& state,
                     BlockSelector wrt = BlockSelector::all, double lr_scale = 1.0);

}  // namespace pof
