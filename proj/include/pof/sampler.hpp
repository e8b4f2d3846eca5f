#pragma once

#include <vector>

#include "pof/dataset.hpp"
#include "pof/rng.hpp"

namespace pof {

enum class SamplerMode { shuffle_epoch, iid_with_replacement };

/// Deterministic mini-batch source over a dataset. Single-owner: not safe to
/// share across threads; the dataset must outlive the sampler. The batch
/// sequence is a pure function of (dataset, batch_size, mode, seed).
class BatchSampler {
 public:
  BatchSampler(const Dataset& data, int batch_size, std::uint64_t seed,
               SamplerMode mode = SamplerMode::iid_with_replacement);

  Batch next();

  /// shuffle_epoch only: whether the current epoch still has batches.
  bool has_next() const;
  /// Begin a new epoch with a fresh permutation.
  void reset();

  int batch_size() const { return batch_size_; }
  SamplerMode mode() const { return mode_; }
  Index batches_per_epoch() const;

 private:
  const Dataset* data_;
  int batch_size_;
  SamplerMode mode_;
  Rng rng_;
  std::vector<Index> order_;
  Index cursor_ = 0;
};

}  // namespace pof
