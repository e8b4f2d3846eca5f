#pragma once

#include <filesystem>
#include <string>

#include "pof/mlp.hpp"
#include "pof/types.hpp"

namespace pof {

enum class ToyKind { gaussian_mixture, two_spirals };

/// Machine-generated classification task. Train and test are drawn from the
/// same distribution with independent noise, so their empirical minimizers
/// differ whenever the classes overlap.
struct ToyDatasetSpec {
  ToyKind kind = ToyKind::gaussian_mixture;
  int n_classes = 4;
  int n_train = 2000;
  int n_test = 2000;
  int input_dim = 2;
  double noise_sigma = 0.8;
  std::uint64_t seed = 0;

  void validate() const;
};

/// A full split stored as one batch-shaped block (rows are samples).
struct Dataset {
  Matrix inputs;
  IntVector labels;

  Index size() const { return inputs.rows(); }
  Batch as_batch() const { return make_class_batch(inputs, labels); }
  /// Rows selected by index, in order.
  Batch gather(const std::vector<Index>& rows) const;
};

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

/// Deterministic generation: the result is a pure function of the spec.
TrainTestSplit generate(const ToyDatasetSpec& spec);

/// One sample per row: feature columns then the integer label.
void export_delimited(const Dataset& data, const std::filesystem::path& path);
Dataset import_delimited(const std::filesystem::path& path);

}  // namespace pof
