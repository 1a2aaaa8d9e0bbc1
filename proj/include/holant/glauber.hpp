#pragma once

#include <cstdint>
#include <vector>

#include "holant/error.hpp"
#include "holant/instance.hpp"
#include "holant/parallel.hpp"
#include "holant/rng.hpp"

namespace holant::glauber {

// Heat-bath probability of occupying edge e given the rest of cfg. Uses only
// the two endpoint signatures: sigma_e appears in exactly two vertex factors,
// which is what makes a step O(1) with occupancy counters.
inline double heat_bath_p(const HolantInstance& inst, EdgeId e, int count_u_excl,
                          int count_v_excl) {
  Edge ed = inst.graph().edge(e);
  const Signature& fu = inst.sig(ed.u);
  const Signature& fv = inst.sig(ed.v);
  double t1 = inst.lambda(e) * fu(count_u_excl + 1) * fv(count_v_excl + 1);
  double t0 = fu(count_u_excl) * fv(count_v_excl);
  if (t0 + t1 <= 0.0)
    throw HolantError(Errc::precondition_violated,
                      "heat-bath update from a zero-weight configuration");
  return t1 / (t0 + t1);
}

// Mutable single-chain state. `occupancy[v]` always equals |S cap E_v| for
// the current configuration, and weight(cfg) stays positive: the heat-bath
// update never moves to a zero-weight configuration.
struct ChainState {
  EdgeConfig cfg;
  std::vector<int> occupancy;
  Rng rng;
  std::uint64_t step_count = 0;
};

inline ChainState make_chain(const HolantInstance& inst, const EdgeConfig& start,
                             std::uint64_t seed) {
  if (start.size() != inst.edge_count())
    throw HolantError(Errc::invalid_argument, "start configuration length mismatch");
  if (!(inst.weight(start) > 0.0))
    throw HolantError(Errc::infeasible_start, "start configuration has zero weight");
  ChainState st{start, inst.occupancy_counts(start), Rng(seed), 0};
  return st;
}

// One Glauber step: pick an edge uniformly, then resample its state from the
// conditional distribution. Two RNG draws per step, edge index first.
inline void step(ChainState& st, const HolantInstance& inst) {
  int m = inst.edge_count();
  EdgeId e = static_cast<EdgeId>(st.rng.next_below(static_cast<std::uint32_t>(m)));
  double u = st.rng.next_double();
  Edge ed = inst.graph().edge(e);
  int cur = st.cfg.get(e) ? 1 : 0;
  int cu = st.occupancy[static_cast<std::size_t>(ed.u)] - cur;
  int cv = st.occupancy[static_cast<std::size_t>(ed.v)] - cur;
  double p = heat_bath_p(inst, e, cu, cv);
  int next = u < p ? 1 : 0;
  if (next != cur) {
    st.cfg.set(e, next != 0);
    st.occupancy[static_cast<std::size_t>(ed.u)] += next - cur;
    st.occupancy[static_cast<std::size_t>(ed.v)] += next - cur;
  }
  ++st.step_count;
}

// Runs `steps` updates from `start` (empty configuration by default, always
// feasible when f_v(0) > 0). Deterministic in (inst, steps, seed, start).
inline EdgeConfig run(const HolantInstance& inst, std::uint64_t steps, std::uint64_t seed,
                      const EdgeConfig* start = nullptr) {
  EdgeConfig s0 = start ? *start : EdgeConfig(inst.edge_count());
  if (inst.edge_count() == 0) return s0;
  ChainState st = make_chain(inst, s0, seed);
  for (std::uint64_t t = 0; t < steps; ++t) step(st, inst);
  return st.cfg;
}

// `count` independent chains with seeds split_seed(seed, i); chains may run
// concurrently, output order is by index.
inline std::vector<EdgeConfig> sample_batch(const HolantInstance& inst, int count,
                                            std::uint64_t steps, std::uint64_t seed,
                                            const EdgeConfig* start = nullptr) {
  std::vector<EdgeConfig> out(static_cast<std::size_t>(count));
  parallel_for(count, [&](int i) {
    out[static_cast<std::size_t>(i)] =
        run(inst, steps, split_seed(seed, static_cast<std::uint64_t>(i)), start);
  });
  return out;
}

// Greedy max-occupancy start: add edges in ascending id order while the
// configuration weight stays positive. Used for worst-case mixing probes.
inline EdgeConfig greedy_max_start(const HolantInstance& inst) {
  EdgeConfig cfg(inst.edge_count());
  std::vector<int> occ(static_cast<std::size_t>(inst.vertex_count()), 0);
  for (EdgeId e = 0; e < inst.edge_count(); ++e) {
    Edge ed = inst.graph().edge(e);
    int cu = occ[static_cast<std::size_t>(ed.u)];
    int cv = occ[static_cast<std::size_t>(ed.v)];
    if (inst.sig(ed.u)(cu + 1) > 0.0 && inst.sig(ed.v)(cv + 1) > 0.0) {
      cfg.set(e, true);
      ++occ[static_cast<std::size_t>(ed.u)];
      ++occ[static_cast<std::size_t>(ed.v)];
    }
  }
  return cfg;
}

}  // namespace holant::glauber
