#pragma once

#include <optional>

#include "pof/line_search.hpp"
#include "pof/rng.hpp"
#include "pof/sampler.hpp"
#include "pof/sgd.hpp"

namespace pof {

enum class GammaMode { fixed, uniform, linear_growth };

/// Expansion-factor policy. gamma scales the searched distance xi*:
/// gamma = 1 lands on the mini-batch minimum, gamma = 2 on its mirror point.
struct GammaPolicy {
  GammaMode mode = GammaMode::uniform;
  double fixed_value = 2.0;
  double lo = 0.0;  // uniform range, also linear-growth start
  double hi = 2.0;  // uniform range, also linear-growth end

  void validate() const;
};

struct PofConfig {
  GammaPolicy gamma;
  SgdConfig base;  // drives the feature-extractor update
  LineSearchConfig linesearch;
  int weak_batch_size = 32;  // size of the line-search batch B
  bool drift_correction = false;
  bool reject_asymmetric = true;
  int max_redraws = 8;

  void validate() const;
};

/// Mutable trainer state across pof steps.
struct PofState {
  SgdState phi;
  SgdState theta;  // only touched by drift correction
  Rng gamma_rng;
  long long step_index = 0;   // completed steps
  long long total_steps = 0;  // required by linear-growth gamma

  PofState(const ParamVector& params, std::uint64_t gamma_seed)
      : phi(make_sgd_state(params)), theta(make_sgd_state(params)), gamma_rng(gamma_seed) {}
};

/// One line per iteration of the post-training loop.
struct PofStepLog {
  long long iter = 0;
  double xi_star = 0.0;
  double gamma = 0.0;
  double delta_theta_norm = 0.0;  // == gamma * xi_star (unit direction)
  double loss_at_zero = 0.0;
  double loss_at_star = 0.0;
  bool asymmetric = false;
  int redraws = 0;
};

/// One iteration of post-training: draw B, line-search xi*, draw a fresh
/// B-tilde, update the feature extractor against the classifier perturbed by
/// -gamma xi* along the normalized batch gradient. Classifier blocks stay
/// untouched unless drift correction is on.
PofStepLog pof_step(ParamVector& params, const MlpSpec& spec, const ModelSplit& split,
                    BatchSampler& sampler_b, BatchSampler& sampler_btilde, const PofConfig& cfg,
                    PofState& state, double lr_scale = 1.0);

}  // namespace pof
