#include "pof/param_vector.hpp"

#include <algorithm>

#include "pof/error.hpp"

namespace pof {

std::string BlockInfo::name() const {
  return "layer" + std::to_string(layer) + (kind == BlockKind::weight ? ".weight" : ".bias");
}

ParamLayout::ParamLayout(std::vector<BlockInfo> blocks) : blocks_(std::move(blocks)) {
  Index expected_offset = 0;
  for (const BlockInfo& b : blocks_) {
    require(b.size == b.rows * b.cols, "layout", b.name() + ": size does not match shape");
    require(b.offset == expected_offset, "layout", b.name() + ": offsets must be contiguous");
    expected_offset += b.size;
    n_layers_ = std::max(n_layers_, b.layer + 1);
  }
  total_ = expected_offset;
}

const BlockInfo& ParamLayout::block(int layer, BlockKind kind) const {
  for (const BlockInfo& b : blocks_) {
    if (b.layer == layer && b.kind == kind) return b;
  }
  fail("layout", "no block for layer ", layer, kind == BlockKind::weight ? " weight" : " bias");
}

bool ParamLayout::has_block(int layer, BlockKind kind) const {
  for (const BlockInfo& b : blocks_) {
    if (b.layer == layer && b.kind == kind) return true;
  }
  return false;
}

BlockSpan ParamLayout::layer_span(int layer) const {
  Index lo = -1;
  Index hi = -1;
  for (const BlockInfo& b : blocks_) {
    if (b.layer != layer) continue;
    if (lo < 0) lo = b.offset;
    require(hi < 0 || b.offset == hi, "layout", "layer blocks are not contiguous");
    hi = b.offset + b.size;
  }
  require(lo >= 0, "layout", "layer " + std::to_string(layer) + " not in layout");
  return {lo, hi - lo, "layer" + std::to_string(layer)};
}

BlockSpan ParamLayout::layer_suffix_span(int first_layer) const {
  const BlockSpan first = layer_span(first_layer);
  return {first.offset, total_ - first.offset, "layers" + std::to_string(first_layer) + "+"};
}

Eigen::Map<Matrix> ParamVector::weight(int layer) {
  const BlockInfo& b = layout->block(layer, BlockKind::weight);
  return Eigen::Map<Matrix>(values.data() + b.offset, b.rows, b.cols);
}

Eigen::Map<const Matrix> ParamVector::weight(int layer) const {
  const BlockInfo& b = layout->block(layer, BlockKind::weight);
  return Eigen::Map<const Matrix>(values.data() + b.offset, b.rows, b.cols);
}

VectorRef ParamVector::bias(int layer) {
  const BlockInfo& b = layout->block(layer, BlockKind::bias);
  return values.segment(b.offset, b.size);
}

ConstVectorRef ParamVector::bias(int layer) const {
  const BlockInfo& b = layout->block(layer, BlockKind::bias);
  return values.segment(b.offset, b.size);
}

ParamVector zeros_like(const ParamVector& other) {
  ParamVector out;
  out.values = Vector::Zero(other.values.size());
  out.layout = other.layout;
  return out;
}

void ModelSplit::validate(int n_layers) const {
  std::vector<bool> seen(static_cast<std::size_t>(n_layers), false);
  auto mark = [&](int layer) {
    require(layer >= 0 && layer < n_layers, "split", "layer id out of range");
    require(!seen[static_cast<std::size_t>(layer)], "split", "layer listed twice");
    seen[static_cast<std::size_t>(layer)] = true;
  };
  for (int l : feature_layers) mark(l);
  for (int l : classifier_layers) mark(l);
  require(std::all_of(seen.begin(), seen.end(), [](bool v) { return v; }), "split",
          "feature and classifier layers must cover every layer");
  require(!classifier_layers.empty(), "split", "classifier must own at least one layer");
  // Classifier layers must be the trailing layers.
  const int first = *std::min_element(classifier_layers.begin(), classifier_layers.end());
  require(static_cast<int>(classifier_layers.size()) == n_layers - first, "split",
          "classifier layers must form a suffix of the layer ordering");
}

bool ModelSplit::is_classifier(int layer) const {
  return std::find(classifier_layers.begin(), classifier_layers.end(), layer) != classifier_layers.end();
}

int ModelSplit::first_classifier_layer() const {
  require(!classifier_layers.empty(), "split", "classifier is empty");
  return *std::min_element(classifier_layers.begin(), classifier_layers.end());
}

BlockSpan ModelSplit::theta_span(const ParamLayout& layout) const {
  BlockSpan s = layout.layer_suffix_span(first_classifier_layer());
  s.label = "theta";
  return s;
}

ModelSplit make_suffix_split(int n_layers, int n_classifier_layers) {
  require(n_classifier_layers >= 1 && n_classifier_layers < n_layers, "split",
          "classifier layer count must be in [1, n_layers)");
  ModelSplit split;
  for (int l = 0; l < n_layers - n_classifier_layers; ++l) split.feature_layers.push_back(l);
  for (int l = n_layers - n_classifier_layers; l < n_layers; ++l) split.classifier_layers.push_back(l);
  return split;
}

}  // namespace pof
