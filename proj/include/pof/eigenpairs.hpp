#pragma once

#include <vector>

#include "pof/hvp.hpp"

namespace pof {

struct EigenPair {
  double value = 0.0;
  Vector vector;          // unit norm, block-local
  double residual = 0.0;  // ||H v - lambda v||_2
  bool converged = false;
};

struct PowerIterConfig {
  int max_iters = 500;
  double value_tol = 1e-8;     // relative eigenvalue change between iterates
  double residual_tol = 1e-6;  // relative to |lambda|
  std::uint64_t seed = 0x9e1a;

  void validate() const;
};

/// Top-k eigenpairs of the finite-difference Hessian block, by power
/// iteration with Gram-Schmidt deflation against already-found vectors.
/// Pairs come back in descending |eigenvalue| order; non-convergence is
/// reported through the flag, never thrown.
std::vector<EigenPair> top_k_eigenpairs(const ParamVector& params, const MlpSpec& spec,
                                        const Batch& data, const ModelSplit& split,
                                        const BlockSpan& block, int k,
                                        const PowerIterConfig& cfg = {});

}  // namespace pof
