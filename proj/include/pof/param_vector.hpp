#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pof/types.hpp"

namespace pof {

enum class BlockKind { weight, bias };

/// One parameter tensor inside the flat vector. Weight matrices are stored
/// column-major in their segment.
struct BlockInfo {
  int layer = 0;
  BlockKind kind = BlockKind::weight;
  Index rows = 0;
  Index cols = 0;  // 1 for bias blocks
  Index offset = 0;
  Index size = 0;

  std::string name() const;
};

/// Contiguous slice of the flat vector, used to address per-layer or
/// classifier-aggregate parameter groups.
struct BlockSpan {
  Index offset = 0;
  Index size = 0;
  std::string label;
};

/// Ordered block table for a model. Blocks are laid out layer by layer,
/// weight then bias, with contiguous non-overlapping offsets.
class ParamLayout {
 public:
  ParamLayout() = default;
  explicit ParamLayout(std::vector<BlockInfo> blocks);

  const std::vector<BlockInfo>& blocks() const { return blocks_; }
  Index total_size() const { return total_; }
  int n_layers() const { return n_layers_; }

  const BlockInfo& block(int layer, BlockKind kind) const;
  bool has_block(int layer, BlockKind kind) const;

  /// Span covering every block of one layer (weight and bias together).
  BlockSpan layer_span(int layer) const;
  /// Span covering the layers [first_layer, last]. They must be contiguous.
  BlockSpan layer_suffix_span(int first_layer) const;

 private:
  std::vector<BlockInfo> blocks_;
  Index total_ = 0;
  int n_layers_ = 0;
};

/// Flat parameter vector plus its block layout. Copies share the layout.
struct ParamVector {
  Vector values;
  std::shared_ptr<const ParamLayout> layout;

  Index size() const { return values.size(); }

  Eigen::Map<Matrix> weight(int layer);
  Eigen::Map<const Matrix> weight(int layer) const;
  VectorRef bias(int layer);
  ConstVectorRef bias(int layer) const;
  VectorRef span(const BlockSpan& s) { return values.segment(s.offset, s.size); }
  ConstVectorRef span(const BlockSpan& s) const { return values.segment(s.offset, s.size); }

  bool all_finite() const { return values.allFinite(); }
};

/// Zero-initialized vector over an existing layout.
ParamVector zeros_like(const ParamVector& other);

/// Partition of layers into feature extractor (phi) and classifier (theta).
/// The classifier layers must form a suffix of the layer ordering.
struct ModelSplit {
  std::vector<int> feature_layers;
  std::vector<int> classifier_layers;

  void validate(int n_layers) const;
  bool is_classifier(int layer) const;
  int first_classifier_layer() const;

  /// Contiguous span of all classifier parameters in the flat vector.
  BlockSpan theta_span(const ParamLayout& layout) const;
};

/// Split with the last `n_classifier_layers` layers as the classifier.
ModelSplit make_suffix_split(int n_layers, int n_classifier_layers = 1);

}  // namespace pof
