#pragma once

#include <functional>

#include "pof/mlp.hpp"
#include "pof/param_vector.hpp"

namespace pof {

enum class RefineMethod { parabolic, golden_section };

struct LineSearchConfig {
  double xi_max = 10.0;
  int coarse_points = 32;
  RefineMethod refine = RefineMethod::parabolic;
  double refine_tol = 1e-4;
  double asymmetry_ratio = 0.5;

  void validate() const;
};

/// Outcome of minimizing a 1-D restriction f(xi), xi >= 0.
struct RayScan {
  double xi_star = 0.0;
  double loss_at_star = 0.0;
  bool saturated = false;  // loss still falling at xi_max; xi_star sits on the grid edge
  int n_evals = 0;
};

/// Minimize f over [0, xi_max]: coarse geometric grid, bracket, then
/// parabolic or golden-section refinement down to a relative bracket width
/// of refine_tol. `f0` is f(0). Guarantees loss_at_star <= f0.
RayScan minimize_on_ray(const std::function<double(double)>& f, double f0,
                        const LineSearchConfig& cfg);

struct LineSearchResult {
  double xi_star = 0.0;
  Vector direction;  // unit vector over the classifier span (compact)
  double loss_at_zero = 0.0;
  double loss_at_star = 0.0;
  double loss_at_mirror = 0.0;  // at xi = 2 xi_star
  bool asymmetric = false;      // far side of the minimum stays well below loss_at_zero
  bool saturated = false;
  int n_evals = 0;
};

/// Distance to the mini-batch loss minimum along the normalized negative
/// classifier gradient, with landscape-shape flags. Throws when the
/// classifier gradient of the batch vanishes.
LineSearchResult line_search_xi(const ParamVector& params, const MlpSpec& spec, const Batch& batch,
                                const ModelSplit& split, const LineSearchConfig& cfg);

}  // namespace pof
