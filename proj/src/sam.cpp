#include "pof/sam.hpp"

#include "pof/error.hpp"

namespace pof {

void SamConfig::validate() const {
  require(rho > 0.0, "config", "sam rho must be positive");
  base.validate();
}

SamStepInfo sam_step(ParamVector& params, const MlpSpec& spec, const Batch& batch,
                     const ModelSplit& split, const SamConfig& cfg, SgdState& state,
                     double lr_scale) {
  cfg.validate();
  SamStepInfo info;

  const ParamVector g0 = grad(params, spec, batch, split, BlockSelector::all, &info.loss);
  if (!g0.values.allFinite()) {
    fail("numeric", "non-finite gradient in sam ascent step");
  }
  const double g_norm = g0.values.norm();

  if (g_norm == 0.0) {
    // Nothing to ascend along; fall back to a plain step.
    info.perturbed = false;
    info.perturbation_norm = 0.0;
    info.update_norm = apply_sgd_update(params, g0.values, split, cfg.base, state,
                                        BlockSelector::all, lr_scale);
    return info;
  }

  ParamVector perturbed = params;
  perturbed.values += (cfg.rho / g_norm) * g0.values;
  const ParamVector g1 = grad(perturbed, spec, batch, split, BlockSelector::all, &info.loss);
  if (!g1.values.allFinite()) {
    fail("numeric", "non-finite gradient at the sam-perturbed point");
  }
  info.perturbation_norm = cfg.rho;
  info.update_norm =
      apply_sgd_update(params, g1.values, split, cfg.base, state, BlockSelector::all, lr_scale);
  return info;
}

}  // namespace pof
