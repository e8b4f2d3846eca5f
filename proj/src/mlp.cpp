#include "pof/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "pof/error.hpp"

namespace pof {

namespace {

Matrix apply_activation(const Matrix& z, Activation act) {
  if (act == Activation::relu) return z.cwiseMax(0.0);
  return z.array().tanh().matrix();
}

// Derivative of the activation expressed through the pre-activation z.
Matrix activation_deriv(const Matrix& z, Activation act) {
  if (act == Activation::relu) {
    return (z.array() > 0.0).cast<Scalar>().matrix();
  }
  return (1.0 - z.array().tanh().square()).matrix();
}

struct ForwardTrace {
  std::vector<Matrix> acts;     // acts[l] = input to layer l; acts[0] = batch inputs
  std::vector<Matrix> preacts;  // preacts[l] = acts[l] * W_l^T + b_l
};

void check_batch(const MlpSpec& spec, const Batch& batch) {
  require(batch.size() >= 1, "batch", "batch must contain at least one sample");
  if (batch.inputs.cols() != spec.input_dim()) {
    fail("shape", "batch inputs have dim ", batch.inputs.cols(), ", layer0.weight expects ",
         spec.input_dim());
  }
  if (spec.loss == LossKind::softmax_cross_entropy) {
    require(batch.has_labels(), "batch", "softmax-cross-entropy needs integer labels");
    require(batch.labels.size() == batch.size(), "batch", "label count != sample count");
    for (Index i = 0; i < batch.labels.size(); ++i) {
      const int c = batch.labels[i];
      if (c < 0 || c >= spec.output_dim()) {
        fail("batch", "label ", c, " outside [0, ", spec.output_dim(), ")");
      }
    }
  } else {
    require(batch.targets.rows() == batch.size(), "batch", "target count != sample count");
    if (batch.targets.cols() != spec.output_dim()) {
      fail("shape", "targets have dim ", batch.targets.cols(), ", final layer emits ",
           spec.output_dim());
    }
  }
}

void check_params(const ParamVector& params, const MlpSpec& spec) {
  require(params.layout != nullptr, "params", "parameter vector has no layout");
  const ParamLayout expected = make_layout(spec);
  if (params.layout->total_size() != expected.total_size() ||
      params.layout->n_layers() != expected.n_layers()) {
    fail("shape", "parameter layout does not match spec (", params.layout->total_size(),
         " values, spec wants ", expected.total_size(), ")");
  }
  for (const BlockInfo& b : expected.blocks()) {
    const BlockInfo& got = params.layout->block(b.layer, b.kind);
    if (got.rows != b.rows || got.cols != b.cols || got.offset != b.offset) {
      fail("shape", "block ", b.name(), " has shape ", got.rows, "x", got.cols, ", spec wants ",
           b.rows, "x", b.cols);
    }
  }
}

ForwardTrace forward_pass(const ParamVector& params, const MlpSpec& spec, const Matrix& inputs) {
  ForwardTrace t;
  const int L = spec.n_layers();
  t.acts.reserve(static_cast<std::size_t>(L));
  t.preacts.reserve(static_cast<std::size_t>(L));
  Matrix a = inputs;
  for (int l = 0; l < L; ++l) {
    t.acts.push_back(a);
    Matrix z = a * params.weight(l).transpose();
    if (spec.with_bias) z.rowwise() += params.bias(l).transpose();
    t.preacts.push_back(z);
    a = (l + 1 < L) ? apply_activation(z, spec.activation) : z;
  }
  return t;
}

// Mean of per-sample losses with a canonical (sorted) accumulation order, so
// the batch loss is invariant under sample reordering.
double sorted_mean(std::vector<double> vals) {
  std::sort(vals.begin(), vals.end());
  double sum = 0.0;
  for (double v : vals) sum += v;
  return sum / static_cast<double>(vals.size());
}

double mean_loss(const MlpSpec& spec, const Batch& batch, const Matrix& out,
                 Matrix* dloss_dout = nullptr) {
  const double n = static_cast<double>(batch.size());
  std::vector<double> per_sample(static_cast<std::size_t>(out.rows()));
  if (spec.loss == LossKind::squared_error) {
    const Matrix resid = out - batch.targets;
    for (Index i = 0; i < out.rows(); ++i) {
      per_sample[static_cast<std::size_t>(i)] = 0.5 * resid.row(i).squaredNorm();
    }
    if (dloss_dout) *dloss_dout = resid / n;
    return sorted_mean(std::move(per_sample));
  }
  // Softmax cross-entropy with log-sum-exp stabilization.
  const Vector row_max = out.rowwise().maxCoeff();
  const Matrix shifted = out.colwise() - row_max;
  const Vector log_z = shifted.array().exp().rowwise().sum().log().matrix();
  for (Index i = 0; i < out.rows(); ++i) {
    per_sample[static_cast<std::size_t>(i)] = log_z[i] - shifted(i, batch.labels[i]);
  }
  if (dloss_dout) {
    Matrix p = (shifted.colwise() - log_z).array().exp().matrix();
    for (Index i = 0; i < out.rows(); ++i) p(i, batch.labels[i]) -= 1.0;
    *dloss_dout = p / n;
  }
  return sorted_mean(std::move(per_sample));
}

bool selected(BlockSelector sel, bool classifier_layer) {
  switch (sel) {
    case BlockSelector::all: return true;
    case BlockSelector::phi_only: return !classifier_layer;
    case BlockSelector::theta_only: return classifier_layer;
  }
  return true;
}

}  // namespace

void MlpSpec::validate() const {
  require(layer_widths.size() >= 3, "spec", "model needs at least 2 weight layers");
  for (int w : layer_widths) require(w >= 1, "spec", "layer widths must be positive");
  if (!init.empty()) {
    require(static_cast<int>(init.size()) == n_layers(), "spec",
            "init must list one entry per weight layer");
  }
}

Batch make_class_batch(Matrix inputs, IntVector labels) {
  Batch b;
  b.inputs = std::move(inputs);
  b.labels = std::move(labels);
  return b;
}

Batch make_regression_batch(Matrix inputs, Matrix targets) {
  Batch b;
  b.inputs = std::move(inputs);
  b.targets = std::move(targets);
  return b;
}

ParamLayout make_layout(const MlpSpec& spec) {
  spec.validate();
  std::vector<BlockInfo> blocks;
  Index offset = 0;
  for (int l = 0; l < spec.n_layers(); ++l) {
    const Index out = spec.layer_widths[static_cast<std::size_t>(l) + 1];
    const Index in = spec.layer_widths[static_cast<std::size_t>(l)];
    blocks.push_back({l, BlockKind::weight, out, in, offset, out * in});
    offset += out * in;
    if (spec.with_bias) {
      blocks.push_back({l, BlockKind::bias, out, 1, offset, out});
      offset += out;
    }
  }
  return ParamLayout(std::move(blocks));
}

std::vector<LayerInit> default_init(const MlpSpec& spec, const ModelSplit& split,
                                    double classifier_sigma) {
  std::vector<LayerInit> init;
  for (int l = 0; l < spec.n_layers(); ++l) {
    if (split.is_classifier(l)) {
      init.push_back({InitKind::normal, classifier_sigma});
    } else {
      init.push_back({InitKind::he_normal, 0.0});
    }
  }
  return init;
}

ParamVector init_params(const MlpSpec& spec, Rng& rng) {
  spec.validate();
  require(!spec.init.empty(), "spec", "init_params needs spec.init to be filled");
  ParamVector p;
  p.layout = std::make_shared<ParamLayout>(make_layout(spec));
  p.values = Vector::Zero(p.layout->total_size());
  for (int l = 0; l < spec.n_layers(); ++l) {
    auto w = p.weight(l);
    const LayerInit& li = spec.init[static_cast<std::size_t>(l)];
    const double sigma = li.kind == InitKind::he_normal
                             ? std::sqrt(2.0 / static_cast<double>(w.cols()))
                             : li.sigma;
    for (Index c = 0; c < w.cols(); ++c) {
      for (Index r = 0; r < w.rows(); ++r) w(r, c) = rng.normal(0.0, sigma);
    }
  }
  return p;
}

Matrix logits(const ParamVector& params, const MlpSpec& spec, const Matrix& inputs) {
  check_params(params, spec);
  if (inputs.cols() != spec.input_dim()) {
    fail("shape", "inputs have dim ", inputs.cols(), ", layer0.weight expects ", spec.input_dim());
  }
  return forward_pass(params, spec, inputs).preacts.back();
}

double forward_loss(const ParamVector& params, const MlpSpec& spec, const Batch& batch) {
  check_params(params, spec);
  check_batch(spec, batch);
  const ForwardTrace t = forward_pass(params, spec, batch.inputs);
  return mean_loss(spec, batch, t.preacts.back());
}

ParamVector grad(const ParamVector& params, const MlpSpec& spec, const Batch& batch,
                 const ModelSplit& split, BlockSelector wrt, double* loss_out) {
  check_params(params, spec);
  check_batch(spec, batch);
  split.validate(spec.n_layers());

  const int L = spec.n_layers();
  const ForwardTrace t = forward_pass(params, spec, batch.inputs);

  Matrix dz;
  const double loss = mean_loss(spec, batch, t.preacts.back(), &dz);
  if (loss_out) *loss_out = loss;

  ParamVector g = zeros_like(params);
  for (int l = L - 1; l >= 0; --l) {
    if (selected(wrt, split.is_classifier(l))) {
      g.weight(l) = dz.transpose() * t.acts[static_cast<std::size_t>(l)];
      if (spec.with_bias) g.bias(l) = dz.colwise().sum().transpose();
    }
    if (l > 0) {
      const Matrix da = dz * params.weight(l);
      dz = da.cwiseProduct(activation_deriv(t.preacts[static_cast<std::size_t>(l) - 1], spec.activation));
    }
  }
  return g;
}

std::pair<double, ParamVector> perturbed_loss_and_grad_phi(const ParamVector& params,
                                                           const MlpSpec& spec, const Batch& batch,
                                                           const ModelSplit& split,
                                                           const Vector& delta_theta) {
  check_params(params, spec);
  split.validate(spec.n_layers());
  require(delta_theta.size() == params.size(), "shape",
          "delta_theta must be a full-length parameter vector");
  const BlockSpan theta = split.theta_span(*params.layout);
  if (theta.offset > 0 && delta_theta.head(theta.offset).cwiseAbs().maxCoeff() != 0.0) {
    fail("split", "delta_theta touches feature-extractor blocks");
  }

  ParamVector shifted = params;
  shifted.values += delta_theta;
  double loss = 0.0;
  ParamVector g = grad(shifted, spec, batch, split, BlockSelector::phi_only, &loss);
  return {loss, std::move(g)};
}

double error_rate(const ParamVector& params, const MlpSpec& spec, const Batch& batch) {
  require(batch.has_labels(), "batch", "error_rate needs labels");
  const Matrix out = logits(params, spec, batch.inputs);
  Index wrong = 0;
  for (Index i = 0; i < out.rows(); ++i) {
    Index argmax = 0;
    out.row(i).maxCoeff(&argmax);
    if (static_cast<int>(argmax) != batch.labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(out.rows());
}

}  // namespace pof
