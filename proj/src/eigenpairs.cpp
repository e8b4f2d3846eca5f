#include "pof/eigenpairs.hpp"

#include <cmath>

#include "pof/error.hpp"
#include "pof/rng.hpp"

namespace pof {

void PowerIterConfig::validate() const {
  require(max_iters >= 1, "config", "max_iters must be positive");
  require(value_tol > 0.0 && residual_tol > 0.0, "config", "tolerances must be positive");
}

namespace {

void orthogonalize(Vector& v, const std::vector<EigenPair>& found) {
  for (const EigenPair& p : found) v -= p.vector.dot(v) * p.vector;
}

}  // namespace

std::vector<EigenPair> top_k_eigenpairs(const ParamVector& params, const MlpSpec& spec,
                                        const Batch& data, const ModelSplit& split,
                                        const BlockSpan& block, int k,
                                        const PowerIterConfig& cfg) {
  cfg.validate();
  require(k >= 1, "eigen", "k must be at least 1");
  require(static_cast<Index>(k) <= block.size, "eigen",
          "k exceeds the dimension of block " + block.label);

  Rng rng(cfg.seed);
  std::vector<EigenPair> found;
  found.reserve(static_cast<std::size_t>(k));

  for (int j = 0; j < k; ++j) {
    Vector v(block.size);
    for (Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
    orthogonalize(v, found);
    v.normalize();

    EigenPair pair;
    double prev = 0.0;
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
      Vector hv = hvp(params, spec, data, split, block, v);
      orthogonalize(hv, found);
      const double lambda = v.dot(hv);
      const double hv_norm = hv.norm();
      pair.value = lambda;
      pair.residual = (hv - lambda * v).norm();
      if (hv_norm == 0.0) {
        // Deflated operator annihilates v: zero eigenvalue direction.
        pair.converged = true;
        break;
      }
      // Stop once the vector itself is resolved, not just the Rayleigh
      // quotient (which converges twice as fast).
      const bool value_settled =
          iter > 0 && std::abs(lambda - prev) <= cfg.value_tol * std::max(1.0, std::abs(lambda));
      const bool residual_small =
          pair.residual <= cfg.residual_tol * std::max(std::abs(lambda), 1e-12);
      if (value_settled && residual_small) {
        pair.converged = true;
        break;
      }
      prev = lambda;
      v = hv / hv_norm;
    }

    pair.vector = v;
    found.push_back(std::move(pair));
  }
  return found;
}

}  // namespace pof
