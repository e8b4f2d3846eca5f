#include "pof/diagnostics.hpp"

#include <cmath>

#include "pof/error.hpp"
#include "pof/hvp.hpp"
#include "pof/sampler.hpp"

namespace pof {

DeltaLReport delta_l_scan(const Checkpoint& ckpt, const Batch& train_scope,
                          const Batch& test_scope, const DeltaLScanConfig& cfg,
                          std::string method_label) {
  require(cfg.n_points >= 3 && cfg.n_points % 2 == 1, "config",
          "delta-l scan needs an odd point count >= 3");
  const double test_loss_at_zero = forward_loss(ckpt.params, ckpt.spec, test_scope);

  DeltaLReport report;
  report.method_label = std::move(method_label);
  for (int layer = 0; layer < ckpt.spec.n_layers(); ++layer) {
    const BlockSpan block = ckpt.params.layout->layer_span(layer);
    const auto pairs =
        top_k_eigenpairs(ckpt.params, ckpt.spec, train_scope, ckpt.split, block, 1, cfg.power);
    const EigenPair& top = pairs.front();

    DeltaLLayerRow row;
    row.layer = layer;
    row.lambda_max = top.value;
    row.reliable = top.converged;

    // Scan width from the curvature and the loss scale: a quadratic rises by
    // the current loss after roughly sqrt(2 L / lambda).
    const double lambda_floor = std::max(top.value, 1e-9);
    const double sigma_s = std::sqrt(2.0 * (test_loss_at_zero + 1e-12) / lambda_floor);
    const double half = cfg.span_sigmas * sigma_s;

    double min_loss = test_loss_at_zero;
    double s_at_min = 0.0;
    ParamVector probe = ckpt.params;
    for (int i = 0; i < cfg.n_points; ++i) {
      const double s = -half + 2.0 * half * static_cast<double>(i) / (cfg.n_points - 1);
      if (s == 0.0) continue;  // already have the exact center value
      probe.values = ckpt.params.values;
      probe.values.segment(block.offset, block.size) += s * top.vector;
      const double loss = forward_loss(probe, ckpt.spec, test_scope);
      if (loss < min_loss) {
        min_loss = loss;
        s_at_min = s;
      }
    }
    row.delta_l = test_loss_at_zero - min_loss;
    row.s_at_min = s_at_min;
    report.rows.push_back(row);
  }
  return report;
}

std::vector<std::pair<double, double>> landscape_slice(const Checkpoint& ckpt, const Batch& scope,
                                                       const BlockSpan& block,
                                                       const Vector& direction, double half_range,
                                                       int n_points) {
  require(direction.size() == block.size, "shape", "direction does not live in block " + block.label);
  require(n_points >= 2, "config", "slice needs at least two points");
  const double norm = direction.norm();
  require(norm > 0.0, "diagnostics", "slice direction is zero");
  const Vector unit = direction / norm;

  std::vector<std::pair<double, double>> table;
  table.reserve(static_cast<std::size_t>(n_points));
  ParamVector probe = ckpt.params;
  for (int i = 0; i < n_points; ++i) {
    const double s = -half_range + 2.0 * half_range * static_cast<double>(i) / (n_points - 1);
    if (s == 0.0) {
      table.emplace_back(0.0, forward_loss(ckpt.params, ckpt.spec, scope));
      continue;
    }
    probe.values = ckpt.params.values;
    probe.values.segment(block.offset, block.size) += s * unit;
    table.emplace_back(s, forward_loss(probe, ckpt.spec, scope));
  }
  return table;
}

int argmax_abs_correlation(const std::vector<EigenPair>& pairs, const Vector& g) {
  require(!pairs.empty(), "diagnostics", "no eigenpairs to correlate against");
  int best = 0;
  double best_corr = -1.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double corr = std::abs(pairs[i].vector.dot(g));
    if (corr > best_corr) {
      best_corr = corr;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::vector<long long> grad_eigvec_correlation_counts(const Checkpoint& ckpt,
                                                      const Dataset& train_set, int k,
                                                      int n_batches, int batch_size,
                                                      std::uint64_t seed,
                                                      const PowerIterConfig& power) {
  const Batch full_train = train_set.as_batch();
  const BlockSpan theta = ckpt.split.theta_span(*ckpt.params.layout);
  const auto pairs =
      top_k_eigenpairs(ckpt.params, ckpt.spec, full_train, ckpt.split, theta, k, power);

  std::vector<long long> counts(static_cast<std::size_t>(k), 0);
  BatchSampler sampler(train_set, batch_size, seed, SamplerMode::iid_with_replacement);
  for (int t = 0; t < n_batches; ++t) {
    const Batch b = sampler.next();
    const ParamVector g = grad(ckpt.params, ckpt.spec, b, ckpt.split, BlockSelector::theta_only);
    const Vector g_theta = g.values.segment(theta.offset, theta.size);
    ++counts[static_cast<std::size_t>(argmax_abs_correlation(pairs, g_theta))];
  }
  return counts;
}

Histogram xi_star_histogram(const Checkpoint& ckpt, const Dataset& scope_set,
                            const LineSearchConfig& search, int n_batches, int batch_size,
                            std::uint64_t seed, int n_bins, XiStarSummary* summary) {
  if (n_batches == 0) return Histogram{};  // callers asking for summaries will throw

  std::vector<double> xis;
  xis.reserve(static_cast<std::size_t>(n_batches));
  XiStarSummary stats;
  BatchSampler sampler(scope_set, batch_size, seed, SamplerMode::iid_with_replacement);
  for (int t = 0; t < n_batches; ++t) {
    const LineSearchResult res =
        line_search_xi(ckpt.params, ckpt.spec, sampler.next(), ckpt.split, search);
    xis.push_back(res.xi_star);
    ++stats.n_batches;
    if (res.asymmetric) ++stats.n_asymmetric;
    if (res.saturated) ++stats.n_saturated;
  }
  stats.median = median_of(xis);
  if (summary) *summary = stats;
  return make_linear_histogram(xis, n_bins);
}

Histogram projected_hessian_histogram(const Checkpoint& ckpt, const Dataset& scope_set,
                                      int n_batches, int batch_size, std::uint64_t seed,
                                      int n_bins, double* median_out) {
  require(n_batches >= 1, "diagnostics", "need at least one batch");
  const Batch full_scope = scope_set.as_batch();
  const BlockSpan theta = ckpt.split.theta_span(*ckpt.params.layout);

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n_batches));
  BatchSampler sampler(scope_set, batch_size, seed, SamplerMode::iid_with_replacement);
  for (int t = 0; t < n_batches; ++t) {
    const ParamVector g =
        grad(ckpt.params, ckpt.spec, sampler.next(), ckpt.split, BlockSelector::theta_only);
    const Vector u = g.values.segment(theta.offset, theta.size);
    require(u.norm() > 0.0, "diagnostics", "mini-batch classifier gradient vanished");
    values.push_back(
        projected_hessian_component(ckpt.params, ckpt.spec, full_scope, ckpt.split, theta, u));
  }
  if (median_out) *median_out = median_of(values);
  return make_linear_histogram(values, n_bins);
}

Histogram perturbation_size_histogram(const std::vector<double>& sizes, int n_bins) {
  require(!sizes.empty(), "diagnostics", "perturbation log is empty");
  return make_log_histogram(sizes, n_bins);
}

EffectiveLoss effective_loss(const Checkpoint& ckpt, const Batch& train_scope, const Batch& batch,
                             double gamma, const LineSearchConfig& search) {
  const BlockSpan theta = ckpt.split.theta_span(*ckpt.params.layout);

  const LineSearchResult res = line_search_xi(ckpt.params, ckpt.spec, batch, ckpt.split, search);

  EffectiveLoss out;
  out.xi_star = res.xi_star;
  out.batch_loss = res.loss_at_zero;
  out.zeroth = forward_loss(ckpt.params, ckpt.spec, train_scope);
  out.u_hd_u = projected_hessian_component(ckpt.params, ckpt.spec, train_scope, ckpt.split, theta,
                                           res.direction);
  out.u_hb_u =
      projected_hessian_component(ckpt.params, ckpt.spec, batch, ckpt.split, theta, res.direction);

  out.second_quadratic = 0.5 * gamma * gamma * res.xi_star * res.xi_star * out.u_hd_u;
  out.total_quadratic = out.zeroth + out.second_quadratic;

  out.ratio_valid = out.u_hb_u > 0.0;
  if (out.ratio_valid) {
    out.second_ratio = gamma * gamma * out.batch_loss * out.u_hd_u / out.u_hb_u;
    out.total_ratio = out.zeroth + out.second_ratio;
  }
  return out;
}

}  // namespace pof
