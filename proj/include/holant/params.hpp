#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "holant/error.hpp"
#include "holant/instance.hpp"

namespace holant {

// Instance parameter system:
//   r_max   = max_v f_v(1)/f_v(0)
//   r_min   = min over v and k >= 1 with f_v(k) > 0 of f_v(k)/f_v(k-1)
//   lambda_max / lambda_min over edges
//   p_max   = max_v P_{f_v}(r_max * lambda_max)
//   delta   = max degree
//
// r_min ranges over positive-support indices k >= 1 only; a vertex whose
// support is {0} contributes no ratio. When no vertex contributes any ratio
// the min is over an empty set and r_min is +infinity (such instances also
// have r_max = 0, so nothing downstream consumes r_min).
struct InstanceParams {
  double r_max = 0.0;
  double r_min = std::numeric_limits<double>::infinity();
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  double p_max = 1.0;
  int delta = 0;
};

inline InstanceParams compute_params(const HolantInstance& inst) {
  if (!inst.positive_at_empty())
    throw HolantError(Errc::precondition_violated,
                      "instance parameters require f_v(0) > 0 for all v");
  InstanceParams p;
  p.delta = inst.graph().max_degree();
  for (VertexId v = 0; v < inst.vertex_count(); ++v) {
    const Signature& f = inst.sig(v);
    p.r_max = std::max(p.r_max, f(1) / f(0));
    for (int k = 1; k <= f.degree(); ++k)
      if (f(k) > 0.0) p.r_min = std::min(p.r_min, f(k) / f(k - 1));
  }
  if (inst.edge_count() > 0) {
    p.lambda_max = *std::max_element(inst.lambdas().begin(), inst.lambdas().end());
    p.lambda_min = *std::min_element(inst.lambdas().begin(), inst.lambdas().end());
  } else {
    p.lambda_max = p.lambda_min = 1.0;
  }
  double x = p.r_max * p.lambda_max;
  p.p_max = 1.0;
  for (VertexId v = 0; v < inst.vertex_count(); ++v)
    p.p_max = std::max(p.p_max, inst.sig(v).gen_poly(x));
  return p;
}

// (r_max^2 lambda_max + 1)^Delta, an upper bound on p_max.
inline double p_max_upper_bound(const InstanceParams& p) {
  return std::pow(p.r_max * p.r_max * p.lambda_max + 1.0, p.delta);
}

}  // namespace holant
