#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pof/config.hpp"
#include "pof/diagnostics.hpp"
#include "pof/train.hpp"

namespace pof {

struct DiagnosticsOptions {
  std::vector<std::string> list;  // which reports to emit
  int n_batches = 400;            // projected-Hessian estimations
  int xi_batches = 200;           // xi* distribution
  int batch_size = 32;
  int top_k = 10;
  int n_bins = 24;
  int slice_points = 41;
  double slice_half_range = 0.0;  // 0 = auto from curvature
  std::uint64_t seed = 0;
  LineSearchConfig linesearch;
  PowerIterConfig power;
};

/// Everything a full run needs; built from a validated KvConfig.
struct ExperimentConfig {
  ToyDatasetSpec dataset;
  MlpSpec model;
  int classifier_layers = 1;
  double classifier_init_sigma = 0.1;
  std::uint64_t init_seed = 0;

  TrainOptions pretrain;
  bool posttrain_enabled = true;
  TrainOptions posttrain;

  DiagnosticsOptions diag;
  int snapshot_every = 0;
  std::uint64_t config_hash = 0;
  std::string canonical_config;
};

const ConfigSchema& experiment_schema();
ExperimentConfig parse_experiment_config(const KvConfig& kv);
KvConfig default_experiment_config();

struct RunRecord {
  std::uint64_t config_hash = 0;
  std::filesystem::path run_dir;
  std::filesystem::path pretrain_checkpoint;
  std::filesystem::path posttrain_checkpoint;  // empty when post-training is off
  std::vector<std::filesystem::path> reports;
  double pretrain_final_test_error = 0.0;
  double posttrain_final_test_error = 0.0;
  double mean_epoch_seconds_pretrain = 0.0;
  double mean_epoch_seconds_posttrain = 0.0;
};

/// data -> pre-train -> diagnostics -> post-train -> diagnostics -> compare.
/// Everything lands under `run_dir`; reruns into a non-empty directory are
/// rejected unless `force`. Identical config + seeds reproduce every
/// artifact byte-for-byte except the timing tables.
RunRecord run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& run_dir,
                         bool force = false);

struct ComparisonRow {
  std::string metric;
  double value_a = 0.0;
  double value_b = 0.0;
};

/// Side-by-side scalar table; both checkpoints must share spec and split.
std::vector<ComparisonRow> compare_checkpoints(const Checkpoint& a, const Checkpoint& b,
                                               const Dataset& train_set, const Dataset& test_set,
                                               const DiagnosticsOptions& diag);

void write_comparison(const std::vector<ComparisonRow>& rows, const std::filesystem::path& path);

}  // namespace pof
