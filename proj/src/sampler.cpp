#include "pof/sampler.hpp"

#include <algorithm>

#include "pof/error.hpp"

namespace pof {

BatchSampler::BatchSampler(const Dataset& data, int batch_size, std::uint64_t seed, SamplerMode mode)
    : data_(&data), batch_size_(batch_size), mode_(mode), rng_(seed) {
  require(batch_size_ >= 1, "sampler", "batch_size must be at least 1");
  require(data.size() >= 1, "sampler", "dataset is empty");
  if (mode_ == SamplerMode::shuffle_epoch) reset();
}

void BatchSampler::reset() {
  order_.resize(static_cast<std::size_t>(data_->size()));
  for (Index i = 0; i < data_->size(); ++i) order_[static_cast<std::size_t>(i)] = i;
  rng_.shuffle(order_);
  cursor_ = 0;
}

bool BatchSampler::has_next() const {
  return mode_ == SamplerMode::iid_with_replacement || cursor_ < data_->size();
}

Index BatchSampler::batches_per_epoch() const {
  return (data_->size() + batch_size_ - 1) / batch_size_;
}

Batch BatchSampler::next() {
  std::vector<Index> rows;
  rows.reserve(static_cast<std::size_t>(batch_size_));
  if (mode_ == SamplerMode::iid_with_replacement) {
    for (int i = 0; i < batch_size_; ++i) {
      rows.push_back(static_cast<Index>(rng_.below(static_cast<std::uint64_t>(data_->size()))));
    }
  } else {
    require(cursor_ < data_->size(), "sampler",
            "shuffle-epoch sampler exhausted; call reset() to start a new epoch");
    const Index take = std::min<Index>(batch_size_, data_->size() - cursor_);
    for (Index i = 0; i < take; ++i) rows.push_back(order_[static_cast<std::size_t>(cursor_ + i)]);
    cursor_ += take;
  }
  return data_->gather(rows);
}

}  // namespace pof
