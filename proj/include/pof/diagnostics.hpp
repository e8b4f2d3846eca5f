#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pof/checkpoint.hpp"
#include "pof/dataset.hpp"
#include "pof/eigenpairs.hpp"
#include "pof/histogram.hpp"
#include "pof/line_search.hpp"

namespace pof {

struct DeltaLScanConfig {
  int n_points = 41;        // odd, so s = 0 is on the grid
  double span_sigmas = 3.0; // scan half-width in auto-scaled units
  PowerIterConfig power;
};

struct DeltaLLayerRow {
  int layer = 0;
  double lambda_max = 0.0;  // top eigenvalue of the train-Hessian layer block
  double delta_l = 0.0;     // test loss at s=0 minus its minimum on the scan
  double s_at_min = 0.0;
  bool reliable = true;     // false when the eigenpair did not converge
};

struct DeltaLReport {
  std::vector<DeltaLLayerRow> rows;
  std::string method_label;
};

/// Per layer: principal eigenvector of the train-set Hessian block, then the
/// test loss scanned along it. delta_l >= 0 by construction.
DeltaLReport delta_l_scan(const Checkpoint& ckpt, const Batch& train_scope,
                          const Batch& test_scope, const DeltaLScanConfig& cfg = {},
                          std::string method_label = {});

/// Loss along params + s * direction/||direction|| on a uniform grid of
/// n_points over [-half_range, half_range]. The s = 0 entry reproduces
/// forward_loss bit-exactly.
std::vector<std::pair<double, double>> landscape_slice(const Checkpoint& ckpt, const Batch& scope,
                                                       const BlockSpan& block,
                                                       const Vector& direction, double half_range,
                                                       int n_points);

/// Index of the eigenvector with the largest |v_i . g| correlation.
int argmax_abs_correlation(const std::vector<EigenPair>& pairs, const Vector& g);

/// For n_batches mini-batches: which top-k train-Hessian eigenvector has the
/// largest |v_i . g_B| against the classifier gradient. Returns counts per
/// eigenvector index (0-based).
std::vector<long long> grad_eigvec_correlation_counts(const Checkpoint& ckpt,
                                                      const Dataset& train_set, int k,
                                                      int n_batches, int batch_size,
                                                      std::uint64_t seed,
                                                      const PowerIterConfig& power = {});

struct XiStarSummary {
  long long n_batches = 0;
  long long n_asymmetric = 0;
  long long n_saturated = 0;
  double median = 0.0;
};

/// Distribution of xi* over mini-batches drawn from `scope_set` (train or
/// test split). n_batches == 0 yields an empty histogram; summaries over an
/// empty histogram throw.
Histogram xi_star_histogram(const Checkpoint& ckpt, const Dataset& scope_set,
                            const LineSearchConfig& search, int n_batches, int batch_size,
                            std::uint64_t seed, int n_bins, XiStarSummary* summary = nullptr);

/// Distribution of u^T H u where u is the unit classifier gradient of a
/// mini-batch from `scope_set` and H is the classifier-block Hessian of the
/// same split. A cheap proxy for the top Hessian eigenvalue.
Histogram projected_hessian_histogram(const Checkpoint& ckpt, const Dataset& scope_set,
                                      int n_batches, int batch_size, std::uint64_t seed,
                                      int n_bins, double* median_out = nullptr);

/// Log-binned histogram of per-iteration perturbation/update magnitudes.
Histogram perturbation_size_histogram(const std::vector<double>& sizes, int n_bins);

/// Quadratic-model decomposition of the post-perturbation training loss:
/// zeroth-order term plus curvature term, in both the xi*-explicit form and
/// the batch-statistics form (their agreement measures model fidelity).
struct EffectiveLoss {
  double zeroth = 0.0;            // L_D at theta0
  double second_quadratic = 0.0;  // (gamma^2 xi*^2 / 2) u^T H_D u
  double total_quadratic = 0.0;
  double second_ratio = 0.0;      // gamma^2 L_B (u^T H_D u)/(u^T H_B u)
  double total_ratio = 0.0;
  bool ratio_valid = true;        // false when u^T H_B u <= 0
  double xi_star = 0.0;
  double batch_loss = 0.0;
  double u_hd_u = 0.0;
  double u_hb_u = 0.0;
};

EffectiveLoss effective_loss(const Checkpoint& ckpt, const Batch& train_scope, const Batch& batch,
                             double gamma, const LineSearchConfig& search);

}  // namespace pof
