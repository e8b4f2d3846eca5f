#pragma once

#include <map>
#include <vector>

#include "pof/checkpoint.hpp"
#include "pof/dataset.hpp"
#include "pof/pof_update.hpp"
#include "pof/sam.hpp"

namespace pof {

enum class TrainMethod { sgd, sam, pof };

struct TrainOptions {
  TrainMethod method = TrainMethod::sgd;
  int epochs = 1;
  int batch_size = 256;  // per-update batch (B-tilde during post-training)
  std::uint64_t seed = 0;

  SgdConfig sgd;  // method == sgd
  SamConfig sam;  // method == sam
  PofConfig pof;  // method == pof

  int snapshot_every = 0;  // keep a parameter snapshot every k epochs (0 = off)
  std::string run_label;

  void validate() const;
};

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double train_error = 0.0;
  double test_loss = 0.0;
  double test_error = 0.0;
  double mean_xi_star = 0.0;  // post-training only
  double lr_scale = 1.0;
  double wall_seconds = 0.0;  // excluded from determinism comparisons
};

struct TrainResult {
  std::vector<EpochMetrics> metrics;
  Checkpoint final_checkpoint;
  std::map<int, ParamVector> snapshots;    // epoch -> parameters
  std::vector<PofStepLog> pof_log;         // per iteration, pof only
  std::vector<double> perturbation_sizes;  // per iteration: sgd update norm,
                                           // sam epsilon norm, pof gamma*xi*
};

/// Run the chosen trainer from `start` for opts.epochs epochs. Deterministic
/// given (start, datasets, opts); wall-clock fields are the only exception.
TrainResult train(const Checkpoint& start, const Dataset& train_set, const Dataset& test_set,
                  const TrainOptions& opts);

const char* method_name(TrainMethod m);

}  // namespace pof
