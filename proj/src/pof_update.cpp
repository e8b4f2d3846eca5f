#include "pof/pof_update.hpp"

#include "pof/error.hpp"

namespace pof {

void GammaPolicy::validate() const {
  switch (mode) {
    case GammaMode::fixed:
      require(fixed_value >= 0.0, "config", "fixed gamma must be nonnegative");
      break;
    case GammaMode::uniform:
    case GammaMode::linear_growth:
      require(lo >= 0.0 && lo <= hi, "config", "gamma range needs 0 <= lo <= hi");
      break;
  }
}

void PofConfig::validate() const {
  gamma.validate();
  base.validate();
  linesearch.validate();
  require(weak_batch_size >= 1, "config", "weak_batch_size must be at least 1");
  require(max_redraws >= 0, "config", "max_redraws must be nonnegative");
}

namespace {

double sample_gamma(const GammaPolicy& policy, PofState& state) {
  switch (policy.mode) {
    case GammaMode::fixed:
      return policy.fixed_value;
    case GammaMode::uniform:
      return state.gamma_rng.uniform(policy.lo, policy.hi);
    case GammaMode::linear_growth: {
      require(state.total_steps > 0, "config",
              "linear-growth gamma needs total_steps set on the state");
      const double t = state.total_steps > 1 ? static_cast<double>(state.step_index) /
                                                   static_cast<double>(state.total_steps - 1)
                                             : 1.0;
      return policy.lo + (policy.hi - policy.lo) * t;
    }
  }
  return 0.0;
}

}  // namespace

PofStepLog pof_step(ParamVector& params, const MlpSpec& spec, const ModelSplit& split,
                    BatchSampler& sampler_b, BatchSampler& sampler_btilde, const PofConfig& cfg,
                    PofState& state, double lr_scale) {
  cfg.validate();
  split.validate(spec.n_layers());

  PofStepLog log;

  // Draw the weak-classifier batch; optionally redraw while the 1-D
  // landscape looks one-sided.
  LineSearchResult search;
  while (true) {
    const Batch b = sampler_b.next();
    search = line_search_xi(params, spec, b, split, cfg.linesearch);
    if (!cfg.reject_asymmetric || !search.asymmetric) break;
    ++log.redraws;
    if (log.redraws > cfg.max_redraws) {
      fail("pof", "redraw budget exhausted: ", log.redraws,
           " consecutive batches had asymmetric 1-D landscapes");
    }
  }

  const double gamma = sample_gamma(cfg.gamma, state);

  // Fresh batch for the feature-extractor update; the perturbation is held
  // constant (no gradient flows through xi* or the direction).
  const Batch btilde = sampler_btilde.next();
  const BlockSpan theta = split.theta_span(*params.layout);
  Vector delta_theta = Vector::Zero(params.size());
  delta_theta.segment(theta.offset, theta.size) = -gamma * search.xi_star * search.direction;

  auto [loss, g_phi] = perturbed_loss_and_grad_phi(params, spec, btilde, split, delta_theta);
  if (!g_phi.values.allFinite()) {
    fail("numeric", "non-finite feature-extractor gradient in pof step");
  }
  apply_sgd_update(params, g_phi.values, split, cfg.base, state.phi, BlockSelector::phi_only,
                   lr_scale);

  if (cfg.drift_correction) {
    // Guard against the classifier minimum drifting away from theta0.
    const Batch correction = sampler_btilde.next();
    sgd_step(params, spec, correction, split, cfg.base, state.theta, BlockSelector::theta_only,
             lr_scale);
  }

  ++state.step_index;
  log.iter = state.step_index;
  log.xi_star = search.xi_star;
  log.gamma = gamma;
  log.delta_theta_norm = gamma * search.xi_star;  // direction has unit norm
  log.loss_at_zero = search.loss_at_zero;
  log.loss_at_star = search.loss_at_star;
  log.asymmetric = search.asymmetric;
  return log;
}

}  // namespace pof
