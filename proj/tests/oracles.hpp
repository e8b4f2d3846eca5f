#pragma once

// Independent oracles used by the unit and acceptance suites. Everything in
// this header recomputes expectations from first principles (finite
// differences, closed forms, explicit enumeration) without going through the
// code paths under test.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "pof/mlp.hpp"
#include "pof/param_vector.hpp"
#include "pof/rng.hpp"
#include "pof/types.hpp"

namespace pof::oracles {

/// Central finite difference of forward_loss along coordinate i.
inline double fd_grad_coord(const ParamVector& params, const MlpSpec& spec, const Batch& batch,
                            Index i, double step = 1e-5) {
  ParamVector p = params;
  p.values[i] = params.values[i] + step;
  const double up = forward_loss(p, spec, batch);
  p.values[i] = params.values[i] - step;
  const double down = forward_loss(p, spec, batch);
  return (up - down) / (2.0 * step);
}

/// Max relative error between the analytic gradient and central differences
/// over `n_coords` coordinates drawn with `rng` (all coordinates when the
/// vector is smaller).
inline double max_fd_rel_error(const ParamVector& params, const MlpSpec& spec, const Batch& batch,
                               const ModelSplit& split, int n_coords, Rng& rng,
                               double step = 1e-5) {
  const ParamVector g = grad(params, spec, batch, split, BlockSelector::all);
  std::vector<Index> coords;
  if (params.size() <= n_coords) {
    for (Index i = 0; i < params.size(); ++i) coords.push_back(i);
  } else {
    for (int k = 0; k < n_coords; ++k) {
      coords.push_back(static_cast<Index>(rng.below(static_cast<std::uint64_t>(params.size()))));
    }
  }
  double worst = 0.0;
  for (Index i : coords) {
    const double fd = fd_grad_coord(params, spec, batch, i, step);
    const double an = g.values[i];
    const double denom = std::max({1e-6, std::abs(fd), std::abs(an)});
    worst = std::max(worst, std::abs(fd - an) / denom);
  }
  return worst;
}

/// Dense finite-difference Hessian of forward_loss restricted to a block,
/// assembled from loss values only (independent of the gradient code).
inline Matrix dense_fd_hessian(const ParamVector& params, const MlpSpec& spec, const Batch& batch,
                               const BlockSpan& block, double h = 1e-3) {
  const Index n = block.size;
  Matrix H(n, n);
  auto eval = [&](Index i, double di, Index j, double dj) {
    ParamVector p = params;
    p.values[block.offset + i] += di;
    p.values[block.offset + j] += dj;
    return forward_loss(p, spec, batch);
  };
  const double f0 = forward_loss(params, spec, batch);
  for (Index i = 0; i < n; ++i) {
    H(i, i) = (eval(i, h, i, 0.0) - 2.0 * f0 + eval(i, -h, i, 0.0)) / (h * h);
    for (Index j = i + 1; j < n; ++j) {
      const double v = (eval(i, h, j, h) - eval(i, h, j, -h) - eval(i, -h, j, h) +
                        eval(i, -h, j, -h)) /
                       (4.0 * h * h);
      H(i, j) = v;
      H(j, i) = v;
    }
  }
  return H;
}

/// Random symmetric positive-definite matrix with eigenvalues in
/// [lambda_min, lambda_max].
inline Matrix random_spd(Index dim, Rng& rng, double lambda_min = 0.1, double lambda_max = 10.0) {
  Matrix a(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) a(i, j) = rng.normal();
  }
  const Eigen::HouseholderQR<Matrix> qr(a);
  const Matrix q = qr.householderQ();
  Vector eig(dim);
  for (Index i = 0; i < dim; ++i) eig[i] = rng.uniform(lambda_min, lambda_max);
  return q * eig.asDiagonal() * q.transpose();
}

/// Step to the minimum of x -> 0.5 (x - x*)^T A (x - x*) along the
/// normalized negative gradient at x0: xi* = ||g|| / (u^T A u).
inline double quadratic_xi_star(const Matrix& a, const Vector& x0, const Vector& x_star) {
  const Vector g = a * (x0 - x_star);
  const Vector u = g.normalized();
  return g.norm() / (u.dot(a * u));
}

/// Two-layer network whose first layer is the identity on nonnegative
/// inputs (relu with unit weights), so the classifier layer sees the raw
/// inputs. Makes least-squares and quadratic-restriction constructions
/// exact while honoring the two-layer minimum.
struct LinearRig {
  MlpSpec spec;
  ModelSplit split;
  ParamVector params;
};

inline LinearRig make_identity_rig(int dim, int out_dim, bool with_bias = true) {
  LinearRig rig;
  rig.spec.layer_widths = {dim, dim, out_dim};
  rig.spec.activation = Activation::relu;
  rig.spec.loss = LossKind::squared_error;
  rig.spec.with_bias = with_bias;
  rig.split = make_suffix_split(2, 1);
  rig.spec.init = default_init(rig.spec, rig.split);
  rig.params.layout = std::make_shared<ParamLayout>(make_layout(rig.spec));
  rig.params.values = Vector::Zero(rig.params.layout->total_size());
  rig.params.weight(0) = Matrix::Identity(dim, dim);
  return rig;
}

/// Least-squares solution of min_W,b mean 0.5 ||W x + b - t||^2 via normal
/// equations on the augmented design matrix.
inline std::pair<Matrix, Vector> least_squares_affine(const Matrix& x, const Matrix& t) {
  Matrix design(x.rows(), x.cols() + 1);
  design << x, Matrix::Ones(x.rows(), 1);
  const Matrix sol = (design.transpose() * design).ldlt().solve(design.transpose() * t);
  Matrix w = sol.topRows(x.cols()).transpose();
  Vector b = sol.row(x.cols()).transpose();
  return {std::move(w), std::move(b)};
}

/// One-sided Mann-Whitney U test (alternative: values in `b` are
/// stochastically smaller than in `a`). Returns the p-value under the
/// normal approximation with tie correction.
inline double mann_whitney_p_less(const std::vector<double>& a, const std::vector<double>& b) {
  struct Tagged {
    double v;
    int from_b;
  };
  std::vector<Tagged> all;
  all.reserve(a.size() + b.size());
  for (double v : a) all.push_back({v, 0});
  for (double v : b) all.push_back({v, 1});
  std::sort(all.begin(), all.end(), [](const Tagged& l, const Tagged& r) { return l.v < r.v; });

  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double n = n1 + n2;
  double rank_sum_b = 0.0;
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].v == all[i].v) ++j;
    const double shared_rank = 0.5 * static_cast<double>(i + j - 1) + 1.0;
    const double t = static_cast<double>(j - i);
    if (t > 1.0) tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].from_b) rank_sum_b += shared_rank;
    }
    i = j;
  }
  const double u_b = rank_sum_b - n2 * (n2 + 1.0) / 2.0;
  const double mean_u = n1 * n2 / 2.0;
  const double var_u = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var_u <= 0.0) return 1.0;
  const double z = (u_b - mean_u + 0.5) / std::sqrt(var_u);
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace pof::oracles
