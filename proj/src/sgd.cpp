#include "pof/sgd.hpp"

#include <cmath>

#include "pof/error.hpp"

namespace pof {

void SgdConfig::validate() const {
  require(lr > 0.0, "config", "lr must be positive");
  require(momentum >= 0.0 && momentum < 1.0, "config", "momentum must be in [0, 1)");
  require(weight_decay >= 0.0, "config", "weight_decay must be nonnegative");
}

double lr_scale_at(const SgdConfig& cfg, int epoch) {
  double scale = 1.0;
  for (const LrMilestone& m : cfg.schedule) {
    if (epoch >= m.epoch) scale *= m.multiplier;
  }
  return scale;
}

SgdState make_sgd_state(const ParamVector& params) {
  return SgdState{Vector::Zero(params.size())};
}

namespace {

// Contiguous spans selected by `wrt`; phi is everything before the
// classifier suffix.
std::vector<std::pair<Index, Index>> selected_ranges(const ParamVector& params,
                                                     const ModelSplit& split, BlockSelector wrt) {
  const BlockSpan theta = split.theta_span(*params.layout);
  switch (wrt) {
    case BlockSelector::all: return {{0, params.size()}};
    case BlockSelector::phi_only: return {{0, theta.offset}};
    case BlockSelector::theta_only: return {{theta.offset, theta.size}};
  }
  return {};
}

}  // namespace

double apply_sgd_update(ParamVector& params, const Vector& gradient, const ModelSplit& split,
                        const SgdConfig& cfg, SgdState& state, BlockSelector wrt,
                        double lr_scale) {
  cfg.validate();
  require(gradient.size() == params.size(), "shape", "gradient length mismatch");
  require(state.velocity.size() == params.size(), "shape", "momentum state length mismatch");

  const double lr = cfg.lr * lr_scale;
  double update_sq = 0.0;
  for (const auto& [offset, size] : selected_ranges(params, split, wrt)) {
    if (size == 0) continue;
    auto w = params.values.segment(offset, size);
    auto v = state.velocity.segment(offset, size);
    const Vector g = gradient.segment(offset, size) + cfg.weight_decay * w;
    v = cfg.momentum * v + g;
    const Vector step = cfg.nesterov ? Vector(g + cfg.momentum * v) : Vector(v);
    w -= lr * step;
    update_sq += lr * lr * step.squaredNorm();
  }
  if (!params.all_finite()) {
    fail("numeric", "non-finite parameters after sgd update");
  }
  return std::sqrt(update_sq);
}

SgdStepInfo sgd_step(ParamVector& params, const MlpSpec& spec, const Batch& batch,
                     const ModelSplit& split, const SgdConfig& cfg, SgdState& state,
                     BlockSelector wrt, double lr_scale) {
  SgdStepInfo info;
  const ParamVector g = grad(params, spec, batch, split, wrt, &info.loss);
  if (!g.values.allFinite()) {
    fail("numeric", "non-finite gradient in sgd step");
  }
  info.update_norm = apply_sgd_update(params, g.values, split, cfg, state, wrt, lr_scale);
  return info;
}

}  // namespace pof
