#pragma once

#include "pof/mlp.hpp"
#include "pof/param_vector.hpp"

namespace pof {

/// Finite-difference step scaled to the parameter magnitude.
double hvp_step(const ParamVector& params);

/// Hessian-vector product restricted to one parameter block, by central
/// differences of the exact gradient: H v = ||v|| (g(x + h v/||v||) -
/// g(x - h v/||v||)) / (2h). `v` is block-local (dimension block.size);
/// data defines the loss scope (mini-batch or a full split packed into one
/// batch).
Vector hvp(const ParamVector& params, const MlpSpec& spec, const Batch& data,
           const ModelSplit& split, const BlockSpan& block, const Vector& v);

/// Rayleigh quotient u^T H u for unit-normalized u in the block.
double projected_hessian_component(const ParamVector& params, const MlpSpec& spec,
                                   const Batch& data, const ModelSplit& split,
                                   const BlockSpan& block, const Vector& u);

}  // namespace pof
