#pragma once

// Test-local reference computations, kept independent of the library's
// oracle: weights are recounted naively from the edge list per
// configuration, and restricted sums filter all 2^m masks instead of
// enumerating the free subspace.

#include <cstdint>
#include <vector>

#include "holant/instance.hpp"

namespace brute {

inline double config_weight(const holant::HolantInstance& inst, std::uint32_t mask) {
  std::vector<int> count(static_cast<std::size_t>(inst.vertex_count()), 0);
  double w = 1.0;
  for (holant::EdgeId e = 0; e < inst.edge_count(); ++e) {
    if (mask & (1u << e)) {
      holant::Edge ed = inst.graph().edge(e);
      ++count[static_cast<std::size_t>(ed.u)];
      ++count[static_cast<std::size_t>(ed.v)];
      w *= inst.lambda(e);
    }
  }
  for (holant::VertexId v = 0; v < inst.vertex_count(); ++v)
    w *= inst.sig(v)(count[static_cast<std::size_t>(v)]);
  return w;
}

inline double partition(const holant::HolantInstance& inst) {
  double z = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << inst.edge_count()); ++mask)
    z += config_weight(inst, mask);
  return z;
}

inline double restricted(const holant::HolantInstance& inst, std::uint32_t domain,
                         std::uint32_t values) {
  double z = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << inst.edge_count()); ++mask)
    if ((mask & domain) == (values & domain)) z += config_weight(inst, mask);
  return z;
}

inline double marginal(const holant::HolantInstance& inst, std::uint32_t domain,
                       std::uint32_t values, holant::EdgeId e) {
  double den = restricted(inst, domain, values);
  double num = restricted(inst, domain | (1u << e), values | (1u << e));
  return num / den;
}

inline std::vector<double> distribution(const holant::HolantInstance& inst) {
  std::vector<double> d(1ull << inst.edge_count());
  double z = 0.0;
  for (std::uint32_t mask = 0; mask < d.size(); ++mask) {
    d[mask] = config_weight(inst, mask);
    z += d[mask];
  }
  for (double& x : d) x /= z;
  return d;
}

}  // namespace brute
