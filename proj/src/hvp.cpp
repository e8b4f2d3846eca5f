#include "pof/hvp.hpp"

#include "pof/error.hpp"

namespace pof {

double hvp_step(const ParamVector& params) {
  return 1e-4 * (1.0 + params.values.cwiseAbs().maxCoeff());
}

Vector hvp(const ParamVector& params, const MlpSpec& spec, const Batch& data,
           const ModelSplit& split, const BlockSpan& block, const Vector& v) {
  require(v.size() == block.size, "shape",
          "hvp direction does not live in block " + block.label);
  const double v_norm = v.norm();
  if (v_norm == 0.0) return Vector::Zero(block.size);

  const double h = hvp_step(params);
  const Vector unit = v / v_norm;

  ParamVector probe = params;
  probe.values.segment(block.offset, block.size) += h * unit;
  const Vector g_up =
      grad(probe, spec, data, split).values.segment(block.offset, block.size);

  probe.values = params.values;
  probe.values.segment(block.offset, block.size) -= h * unit;
  const Vector g_down =
      grad(probe, spec, data, split).values.segment(block.offset, block.size);

  Vector result = (v_norm / (2.0 * h)) * (g_up - g_down);
  if (!result.allFinite()) {
    fail("numeric", "non-finite Hessian-vector product in block ", block.label);
  }
  return result;
}

double projected_hessian_component(const ParamVector& params, const MlpSpec& spec,
                                   const Batch& data, const ModelSplit& split,
                                   const BlockSpan& block, const Vector& u) {
  const double n = u.norm();
  require(n > 0.0, "hvp", "projection direction is zero");
  const Vector unit = u / n;
  return unit.dot(hvp(params, spec, data, split, block, unit));
}

}  // namespace pof
