#include "pof/line_search.hpp"

#include <cmath>
#include <vector>

#include "pof/error.hpp"

namespace pof {

namespace {

constexpr double kGridSpan = 1e-6;    // smallest grid point relative to xi_max
constexpr double kGolden = 0.3819660112501051;  // 2 - golden ratio
constexpr int kMaxRefineIters = 100;
constexpr int kMaxSubdivisions = 1074;  // enough to reach the smallest denormal

struct Bracket {
  double a, fa;
  double b, fb;  // fb <= fa, fb <= fc
  double c, fc;
};

// One refinement probe. Parabolic mode fits the three bracket points and
// jumps to the vertex, falling back to a golden step into the larger half
// whenever the fit degenerates or leaves the bracket.
double propose_point(const Bracket& k, RefineMethod method) {
  const double golden = (k.c - k.b > k.b - k.a) ? k.b + kGolden * (k.c - k.b)
                                                : k.b - kGolden * (k.b - k.a);
  if (method == RefineMethod::golden_section) return golden;

  const double d1 = (k.b - k.a) * (k.fb - k.fc);
  const double d2 = (k.b - k.c) * (k.fb - k.fa);
  const double denom = 2.0 * (d1 - d2);
  if (denom == 0.0 || !std::isfinite(denom)) return golden;
  const double vertex = k.b - ((k.b - k.a) * d1 - (k.b - k.c) * d2) / denom;
  const double margin = 1e-3 * (k.c - k.a);
  if (!std::isfinite(vertex) || vertex <= k.a + margin || vertex >= k.c - margin ||
      std::abs(vertex - k.b) < 1e-12 * std::max(1.0, std::abs(k.b))) {
    return golden;
  }
  return vertex;
}

}  // namespace

void LineSearchConfig::validate() const {
  require(xi_max > 0.0, "config", "xi_max must be positive");
  require(coarse_points >= 8, "config", "coarse_points must be at least 8");
  require(refine_tol > 0.0, "config", "refine_tol must be positive");
  require(asymmetry_ratio > 0.0 && asymmetry_ratio < 1.0, "config",
          "asymmetry_ratio must lie in (0, 1)");
}

RayScan minimize_on_ray(const std::function<double(double)>& f, double f0,
                        const LineSearchConfig& cfg) {
  cfg.validate();
  RayScan out;

  // Coarse geometric grid over (0, xi_max], ascending.
  const int n = cfg.coarse_points;
  const double ratio = std::pow(kGridSpan, 1.0 / static_cast<double>(n - 1));
  std::vector<double> xs(static_cast<std::size_t>(n));
  std::vector<double> fs(static_cast<std::size_t>(n));
  int best = -1;
  for (int i = 0; i < n; ++i) {
    xs[static_cast<std::size_t>(i)] = cfg.xi_max * std::pow(ratio, n - 1 - i);
    fs[static_cast<std::size_t>(i)] = f(xs[static_cast<std::size_t>(i)]);
    ++out.n_evals;
    if (best < 0 || fs[static_cast<std::size_t>(i)] < fs[static_cast<std::size_t>(best)]) best = i;
  }

  Bracket k{};
  if (fs[static_cast<std::size_t>(best)] >= f0) {
    // Every grid point lies above f(0): the minimum hides in (0, xs[0]).
    // Halve until a descent point appears; the ray direction is a descent
    // direction, so one exists at some representable xi.
    double hi = xs[0];
    double fhi = fs[0];
    double x = 0.5 * xs[0];
    int steps = 0;
    while (steps < kMaxSubdivisions) {
      const double fx = f(x);
      ++out.n_evals;
      if (fx < f0) {
        k = {0.0, f0, x, fx, hi, fhi};
        break;
      }
      hi = x;
      fhi = fx;
      x *= 0.5;
      ++steps;
    }
    if (steps >= kMaxSubdivisions) {
      // No representable descent step; treat the origin as the minimum.
      out.xi_star = 0.0;
      out.loss_at_star = f0;
      return out;
    }
  } else if (best == n - 1) {
    // Loss still falling at the grid edge: no interior minimum in range.
    out.saturated = true;
    out.xi_star = xs[static_cast<std::size_t>(n - 1)];
    out.loss_at_star = fs[static_cast<std::size_t>(n - 1)];
    return out;
  } else {
    const double left = best == 0 ? 0.0 : xs[static_cast<std::size_t>(best - 1)];
    const double fleft = best == 0 ? f0 : fs[static_cast<std::size_t>(best - 1)];
    k = {left,
         fleft,
         xs[static_cast<std::size_t>(best)],
         fs[static_cast<std::size_t>(best)],
         xs[static_cast<std::size_t>(best + 1)],
         fs[static_cast<std::size_t>(best + 1)]};
  }

  for (int iter = 0; iter < kMaxRefineIters; ++iter) {
    if (k.c - k.a <= cfg.refine_tol * std::max(std::abs(k.b), 1e-12)) break;
    const double u = propose_point(k, cfg.refine);
    const double fu = f(u);
    ++out.n_evals;
    if (fu < k.fb) {
      if (u < k.b) {
        k.c = k.b;
        k.fc = k.fb;
      } else {
        k.a = k.b;
        k.fa = k.fb;
      }
      k.b = u;
      k.fb = fu;
    } else {
      if (u < k.b) {
        k.a = u;
        k.fa = fu;
      } else {
        k.c = u;
        k.fc = fu;
      }
    }
  }

  out.xi_star = k.b;
  out.loss_at_star = k.fb;
  return out;
}

LineSearchResult line_search_xi(const ParamVector& params, const MlpSpec& spec, const Batch& batch,
                                const ModelSplit& split, const LineSearchConfig& cfg) {
  cfg.validate();
  split.validate(spec.n_layers());

  double loss_at_zero = 0.0;
  const ParamVector g = grad(params, spec, batch, split, BlockSelector::theta_only, &loss_at_zero);
  const BlockSpan theta = split.theta_span(*params.layout);
  const Vector g_theta = g.values.segment(theta.offset, theta.size);
  const double g_norm = g_theta.norm();
  require(std::isfinite(g_norm) && g_norm > 0.0, "linesearch",
          "classifier gradient of the batch is zero; no search direction");

  LineSearchResult res;
  res.direction = g_theta / g_norm;
  res.loss_at_zero = loss_at_zero;

  ParamVector probe = params;
  const Vector theta0 = params.values.segment(theta.offset, theta.size);
  const auto f = [&](double xi) {
    probe.values.segment(theta.offset, theta.size) = theta0 - xi * res.direction;
    return forward_loss(probe, spec, batch);
  };

  const RayScan scan = minimize_on_ray(f, loss_at_zero, cfg);
  require(scan.loss_at_star <= loss_at_zero, "linesearch",
          "search returned a point above the starting loss");
  res.xi_star = scan.xi_star;
  res.loss_at_star = scan.loss_at_star;
  res.saturated = scan.saturated;
  res.n_evals = scan.n_evals;
  res.loss_at_mirror = f(2.0 * scan.xi_star);
  res.asymmetric = res.loss_at_mirror < cfg.asymmetry_ratio * res.loss_at_zero;
  return res;
}

}  // namespace pof
