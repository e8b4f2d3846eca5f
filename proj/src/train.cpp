#include "pof/train.hpp"

#include <chrono>

#include "pof/error.hpp"

namespace pof {

void TrainOptions::validate() const {
  require(epochs >= 1, "config", "epochs must be at least 1");
  require(batch_size >= 1, "config", "batch_size must be at least 1");
  switch (method) {
    case TrainMethod::sgd: sgd.validate(); break;
    case TrainMethod::sam: sam.validate(); break;
    case TrainMethod::pof: pof.validate(); break;
  }
}

const char* method_name(TrainMethod m) {
  switch (m) {
    case TrainMethod::sgd: return "sgd";
    case TrainMethod::sam: return "sam";
    case TrainMethod::pof: return "pof";
  }
  return "?";
}

namespace {

const SgdConfig& base_config(const TrainOptions& opts) {
  switch (opts.method) {
    case TrainMethod::sgd: return opts.sgd;
    case TrainMethod::sam: return opts.sam.base;
    case TrainMethod::pof: return opts.pof.base;
  }
  return opts.sgd;
}

}  // namespace

TrainResult train(const Checkpoint& start, const Dataset& train_set, const Dataset& test_set,
                  const TrainOptions& opts) {
  opts.validate();
  start.spec.validate();
  start.split.validate(start.spec.n_layers());

  TrainResult result;
  ParamVector params = start.params;
  const MlpSpec& spec = start.spec;
  const ModelSplit& split = start.split;

  const Batch full_train = train_set.as_batch();
  const Batch full_test = test_set.as_batch();

  SgdState sgd_state = make_sgd_state(params);
  PofState pof_state(params, mix_seed(opts.seed, 0x67616d6d));
  const Index iters_per_epoch =
      (train_set.size() + opts.batch_size - 1) / opts.batch_size;
  pof_state.total_steps = static_cast<long long>(iters_per_epoch) * opts.epochs;

  // Epoch samplers reshuffle per pass; the i.i.d. streams never exhaust.
  BatchSampler epoch_sampler(train_set, opts.batch_size, mix_seed(opts.seed, 0x73676400),
                             SamplerMode::shuffle_epoch);
  BatchSampler sampler_b(train_set, opts.pof.weak_batch_size, mix_seed(opts.seed, 0x706f6642),
                         SamplerMode::iid_with_replacement);
  BatchSampler sampler_btilde(train_set, opts.batch_size, mix_seed(opts.seed, 0x706f6654),
                              SamplerMode::iid_with_replacement);

  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    const auto tick = std::chrono::steady_clock::now();
    const double lr_scale = lr_scale_at(base_config(opts), epoch);
    double xi_sum = 0.0;
    long long xi_count = 0;
    long long iter = 0;

    try {
      if (opts.method == TrainMethod::pof) {
        for (Index i = 0; i < iters_per_epoch; ++i) {
          ++iter;
          PofStepLog log =
              pof_step(params, spec, split, sampler_b, sampler_btilde, opts.pof, pof_state,
                       lr_scale);
          xi_sum += log.xi_star;
          ++xi_count;
          result.perturbation_sizes.push_back(log.delta_theta_norm);
          result.pof_log.push_back(log);
        }
      } else {
        while (epoch_sampler.has_next()) {
          ++iter;
          const Batch batch = epoch_sampler.next();
          if (opts.method == TrainMethod::sgd) {
            const SgdStepInfo info = sgd_step(params, spec, batch, split, opts.sgd, sgd_state,
                                              BlockSelector::all, lr_scale);
            result.perturbation_sizes.push_back(info.update_norm);
          } else {
            const SamStepInfo info =
                sam_step(params, spec, batch, split, opts.sam, sgd_state, lr_scale);
            result.perturbation_sizes.push_back(info.perturbation_norm);
          }
        }
        epoch_sampler.reset();
      }
    } catch (const Error& e) {
      fail(e.kind(), method_name(opts.method), " failed at epoch ", epoch, " iteration ", iter,
           ": ", e.what());
    }

    EpochMetrics em;
    em.epoch = epoch;
    em.lr_scale = lr_scale;
    em.train_loss = forward_loss(params, spec, full_train);
    em.train_error = error_rate(params, spec, full_train);
    em.test_loss = forward_loss(params, spec, full_test);
    em.test_error = error_rate(params, spec, full_test);
    em.mean_xi_star = xi_count > 0 ? xi_sum / static_cast<double>(xi_count) : 0.0;
    em.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - tick).count();
    result.metrics.push_back(em);

    if (opts.snapshot_every > 0 && (epoch + 1) % opts.snapshot_every == 0) {
      result.snapshots.emplace(epoch, params);
    }
  }

  result.final_checkpoint.spec = spec;
  result.final_checkpoint.split = split;
  result.final_checkpoint.params = std::move(params);
  result.final_checkpoint.rng_label = std::string(method_name(opts.method)) + ":seed=" +
                                      std::to_string(opts.seed) + ":epochs=" +
                                      std::to_string(opts.epochs) +
                                      (start.rng_label.empty() ? "" : " <- " + start.rng_label);
  return result;
}

}  // namespace pof
