#pragma once

#include <string>
#include <vector>

#include "pof/param_vector.hpp"
#include "pof/rng.hpp"
#include "pof/types.hpp"

namespace pof {

enum class Activation { relu, tanh };
enum class LossKind { softmax_cross_entropy, squared_error };
enum class InitKind { he_normal, normal };

/// Weight-init distribution for one layer. Biases always start at zero.
struct LayerInit {
  InitKind kind = InitKind::he_normal;
  double sigma = 0.0;  // used by InitKind::normal
};

/// Dense multi-layer perceptron description. layer_widths[0] is the input
/// dimension; each consecutive pair is one weight layer. Hidden layers apply
/// the activation, the final layer is linear.
struct MlpSpec {
  std::vector<int> layer_widths;
  Activation activation = Activation::tanh;
  LossKind loss = LossKind::softmax_cross_entropy;
  bool with_bias = true;
  std::vector<LayerInit> init;  // one entry per weight layer

  int n_layers() const { return static_cast<int>(layer_widths.size()) - 1; }
  int input_dim() const { return layer_widths.front(); }
  int output_dim() const { return layer_widths.back(); }

  void validate() const;
};

/// Mini-batch. Rows are samples. Classification batches carry integer
/// labels; squared-error batches carry a dense target matrix.
struct Batch {
  Matrix inputs;
  IntVector labels;
  Matrix targets;

  Index size() const { return inputs.rows(); }
  bool has_labels() const { return labels.size() > 0; }
};

Batch make_class_batch(Matrix inputs, IntVector labels);
Batch make_regression_batch(Matrix inputs, Matrix targets);

enum class BlockSelector { all, phi_only, theta_only };

ParamLayout make_layout(const MlpSpec& spec);

/// He-normal for feature layers, N(0, sigma^2) for classifier layers.
std::vector<LayerInit> default_init(const MlpSpec& spec, const ModelSplit& split,
                                    double classifier_sigma = 0.1);

/// Fresh parameter vector drawn from spec.init (biases zero).
ParamVector init_params(const MlpSpec& spec, Rng& rng);

/// Raw network outputs (n x output_dim), no loss applied.
Matrix logits(const ParamVector& params, const MlpSpec& spec, const Matrix& inputs);

/// Mean sample-wise loss over the batch.
double forward_loss(const ParamVector& params, const MlpSpec& spec, const Batch& batch);

/// Exact reverse-mode gradient of forward_loss. Blocks outside `wrt` are
/// zero. Returns the loss through `loss_out` when non-null.
ParamVector grad(const ParamVector& params, const MlpSpec& spec, const Batch& batch,
                 const ModelSplit& split, BlockSelector wrt = BlockSelector::all,
                 double* loss_out = nullptr);

/// Loss and phi-gradient at (phi, theta0 + delta_theta). delta_theta is a
/// full-length vector that must vanish outside the classifier span; it is
/// treated as a constant (no differentiation through it).
std::pair<double, ParamVector> perturbed_loss_and_grad_phi(const ParamVector& params,
                                                           const MlpSpec& spec, const Batch& batch,
                                                           const ModelSplit& split,
                                                           const Vector& delta_theta);

/// Misclassification rate; batch must carry labels.
double error_rate(const ParamVector& params, const MlpSpec& spec, const Batch& batch);

}  // namespace pof
