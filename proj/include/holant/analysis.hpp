#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "holant/coupling.hpp"
#include "holant/error.hpp"
#include "holant/glauber.hpp"
#include "holant/instance.hpp"
#include "holant/oracle.hpp"
#include "holant/parallel.hpp"
#include "holant/params.hpp"
#include "holant/rng.hpp"

// Approximate counting via self-reducibility, spectral-independence sweeps,
// mixing diagnostics, and the two path families with Omega(n) influence.
namespace holant::analysis {

// ---------------------------------------------------------------------------
// Small-graph enumeration for exhaustive sweeps

namespace detail {

inline std::vector<std::pair<int, int>> vertex_pairs(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
  return pairs;
}

inline bool mask_connected(int n, const std::vector<std::pair<int, int>>& pairs,
                           std::uint32_t mask) {
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (!(mask & (1u << p))) continue;
    int a = find(pairs[p].first), b = find(pairs[p].second);
    if (a != b) parent[static_cast<std::size_t>(a)] = b;
  }
  int root = find(0);
  for (int v = 1; v < n; ++v)
    if (find(v) != root) return false;
  return true;
}

// Lexicographically-least edge mask over all vertex relabelings.
inline std::uint32_t canonical_mask(int n, const std::vector<std::pair<int, int>>& pairs,
                                    std::uint32_t mask) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  // pair -> index lookup
  std::vector<std::vector<int>> idx(static_cast<std::size_t>(n),
                                    std::vector<int>(static_cast<std::size_t>(n), -1));
  for (std::size_t p = 0; p < pairs.size(); ++p)
    idx[static_cast<std::size_t>(pairs[p].first)][static_cast<std::size_t>(pairs[p].second)] =
        static_cast<int>(p);
  std::uint32_t best = mask;
  do {
    std::uint32_t relabeled = 0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      if (!(mask & (1u << p))) continue;
      int a = perm[static_cast<std::size_t>(pairs[p].first)];
      int b = perm[static_cast<std::size_t>(pairs[p].second)];
      if (a > b) std::swap(a, b);
      relabeled |= (1u << idx[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]);
    }
    best = std::min(best, relabeled);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace detail

// All connected simple graphs on 2..max_vertices vertices, one representative
// per isomorphism class, in a deterministic order.
inline std::vector<Graph> connected_graphs_up_to(int max_vertices) {
  std::vector<Graph> out;
  for (int n = 2; n <= max_vertices; ++n) {
    auto pairs = detail::vertex_pairs(n);
    std::uint32_t total = 1u << pairs.size();
    for (std::uint32_t mask = 0; mask < total; ++mask) {
      if (!detail::mask_connected(n, pairs, mask)) continue;
      if (detail::canonical_mask(n, pairs, mask) != mask) continue;  // not the representative
      std::vector<std::pair<int, int>> edges;
      for (std::size_t p = 0; p < pairs.size(); ++p)
        if (mask & (1u << p)) edges.push_back(pairs[p]);
      out.push_back(Graph::from_edges(n, edges));
    }
  }
  return out;
}

// Vertex orbits under graph automorphisms; orbit label = smallest member.
// Vertices in one orbit give identical coupling problems for uniform models.
inline std::vector<int> vertex_orbits(const Graph& g) {
  int n = g.vertex_count();
  std::vector<int> orbit(static_cast<std::size_t>(n));
  std::iota(orbit.begin(), orbit.end(), 0);
  std::set<std::pair<int, int>> edges;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    Edge ed = g.edge(e);
    edges.insert({ed.u, ed.v});
  }
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool automorphism = true;
    for (const auto& [u, v] : edges) {
      int a = perm[static_cast<std::size_t>(u)], b = perm[static_cast<std::size_t>(v)];
      if (a > b) std::swap(a, b);
      if (!edges.count({a, b})) {
        automorphism = false;
        break;
      }
    }
    if (automorphism) {
      for (int v = 0; v < n; ++v) {
        int a = std::min(orbit[static_cast<std::size_t>(v)],
                         orbit[static_cast<std::size_t>(perm[static_cast<std::size_t>(v)])]);
        orbit[static_cast<std::size_t>(v)] = a;
        orbit[static_cast<std::size_t>(perm[static_cast<std::size_t>(v)])] = a;
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  // Resolve chains down to fixed points.
  for (int v = 0; v < n; ++v) {
    int r = v;
    while (orbit[static_cast<std::size_t>(r)] != r) r = orbit[static_cast<std::size_t>(r)];
    orbit[static_cast<std::size_t>(v)] = r;
  }
  return orbit;
}

// ---------------------------------------------------------------------------
// Sampling-to-counting reduction

struct CountEstimate {
  double log_z = 0.0;
  double relative_error_target = 0.0;
  long samples_per_marginal = 0;
  long sampled_factors = 0;  // factors that needed sampling (forced edges are exact)
  std::vector<EdgeId> edge_order;
};

inline constexpr double kZ99 = 2.5758293035489004;

// Glauber steps per drawn sample: a fixed multiple of m log m. Desk-scale
// instances mix far faster; the multiple keeps the residual bias well under
// the Bernoulli sampling error budgeted below.
inline std::uint64_t mixing_steps(int m) {
  if (m <= 1) return 32;
  double lm = std::log(static_cast<double>(m));
  return static_cast<std::uint64_t>(std::ceil(20.0 * m * (lm + 1.0)));
}

// Telescoping estimator over ascending edge ids: mu(empty) factors into
// conditional probabilities of pinning each edge to 0 given the previous
// ones, each estimated by Glauber sampling on the induced instance, and
// log Z = sum_v log f_v(0) - sum_i log(factor_i). Pinning to 0 keeps every
// factor >= 1/p_max (marginal bound), so the per-factor sample count
//   N = ceil(2 z99^2 m p_max / eps^2)
// makes the 99% relative error of exp(log_z) at most eps: each factor's
// relative sd is <= sqrt(p_max/N) and m independent factors compound to
// z99 sqrt(m p_max / N) <= eps/sqrt(2).
inline CountEstimate estimate_log_z(const HolantInstance& inst, double eps,
                                    std::uint64_t seed) {
  if (!inst.positive_at_empty())
    throw HolantError(Errc::precondition_violated,
                      "counting estimator requires f_v(0) > 0 for all v");
  if (!(eps > 0.0) || eps >= 1.0)
    throw HolantError(Errc::invalid_argument, "eps must be in (0,1)");
  InstanceParams params = compute_params(inst);
  int m = inst.edge_count();
  CountEstimate est;
  est.relative_error_target = eps;
  for (VertexId v = 0; v < inst.vertex_count(); ++v) est.log_z += std::log(inst.sig(v)(0));
  if (m == 0) return est;
  est.samples_per_marginal = static_cast<long>(
      std::ceil(2.0 * kZ99 * kZ99 * static_cast<double>(m) * params.p_max / (eps * eps)));
  HolantInstance cur = inst;
  for (EdgeId original = 0; original < m; ++original) {
    est.edge_order.push_back(original);
    // After removing the prefix, the next original edge always has id 0.
    Edge ed = cur.graph().edge(0);
    bool can_occupy = cur.sig(ed.u)(1) > 0.0 && cur.sig(ed.v)(1) > 0.0;
    if (can_occupy) {
      // Same chain seeds as sample_batch would use; only the flag is kept.
      std::uint64_t factor_seed = split_seed(seed, static_cast<std::uint64_t>(original));
      std::uint64_t steps = mixing_steps(cur.edge_count());
      int n_samples = static_cast<int>(est.samples_per_marginal);
      std::vector<std::uint8_t> unoccupied(static_cast<std::size_t>(n_samples), 0);
      parallel_for(n_samples, [&](int s) {
        EdgeConfig cfg =
            glauber::run(cur, steps, split_seed(factor_seed, static_cast<std::uint64_t>(s)));
        unoccupied[static_cast<std::size_t>(s)] = cfg.get(0) ? 0 : 1;
      });
      long count0 = 0;
      for (std::uint8_t f : unoccupied) count0 += f;
      if (count0 <= 0)
        throw HolantError(Errc::precondition_violated,
                          "telescoping factor estimated as zero");
      est.log_z -= std::log(static_cast<double>(count0) /
                            static_cast<double>(est.samples_per_marginal));
      ++est.sampled_factors;
    }
    // else: the edge can never be occupied, the factor is exactly 1.
    cur = cur.induced(Pinning::single(0, false)).first;
  }
  return est;
}

// ---------------------------------------------------------------------------
// Spectral-independence sweep

struct SiSweepSpec {
  int max_vertices = 5;
  std::vector<int> bs = {1, 2};
  std::vector<double> lambdas = {0.5, 1.0, 2.0};
};

struct SiSweepRow {
  int graph_index = 0;
  int n = 0, m = 0;
  int b = 0;
  double lambda = 1.0;
  double si_constant = 0.0;
  double bound = 0.0;         // 2 (p_max - 1)
  double remark_bound = 0.0;  // sum_{k<=b} C(Delta,k); NaN unless lambda == 1
  bool pass = false;
};

inline std::vector<SiSweepRow> si_sweep(const SiSweepSpec& spec) {
  auto graphs = connected_graphs_up_to(spec.max_vertices);
  struct Task {
    int gi, b;
    double lambda;
  };
  std::vector<Task> tasks;
  for (int gi = 0; gi < static_cast<int>(graphs.size()); ++gi)
    for (int b : spec.bs)
      for (double lam : spec.lambdas) tasks.push_back({gi, b, lam});
  std::vector<SiSweepRow> rows(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), [&](int ti) {
    const Task& t = tasks[static_cast<std::size_t>(ti)];
    const Graph& g = graphs[static_cast<std::size_t>(t.gi)];
    HolantInstance inst = build_b_matching(g, t.b, t.lambda);
    InstanceParams params = compute_params(inst);
    SiSweepRow row;
    row.graph_index = t.gi;
    row.n = g.vertex_count();
    row.m = g.edge_count();
    row.b = t.b;
    row.lambda = t.lambda;
    row.si_constant = oracle::spectral_independence_constant(inst);
    row.bound = 2.0 * (params.p_max - 1.0);
    row.pass = row.si_constant <= row.bound + 1e-9;
    if (t.lambda == 1.0) {
      int delta = g.max_degree();
      double s = 0.0;
      for (int k = 0; k <= std::min(t.b, delta); ++k) s += Signature::binomial(delta, k);
      row.remark_bound = s;
      row.pass = row.pass && params.p_max <= s + 1e-9;
    } else {
      row.remark_bound = std::numeric_limits<double>::quiet_NaN();
    }
    rows[static_cast<std::size_t>(ti)] = row;
  });
  return rows;
}

// ---------------------------------------------------------------------------
// Influence counterexamples (two path families)

enum class CounterexampleFamily {
  path_mixed_signatures = 1,  // alternating [1,1,0] / [0,1,1] on a path
  path_with_pendants = 2,     // [0,1,1,0] internal vertices, pendant pinning
};

struct CounterexampleInstance {
  CounterexampleFamily family;
  int n = 0;  // path length (number of path edges)
  HolantInstance inst;
  Pinning pendant_pinning;  // family 2 only
};

// Family 1: path v_0 .. v_n with edge i = {v_{i-1}, v_i}; interior odd
// vertices demand at most one occupied edge ([1,1,0]), interior even
// vertices at least one ([0,1,1]); both path ends are unconstrained ([1,1]).
// Family 2: same path plus pendant edges u_i v_i for 1 <= i < n, interior
// signature [0,1,1,0]; pinning the odd pendants occupied and the even ones
// unoccupied reduces it to family 1. Path edges take ids 0..n-1, pendant
// edges follow.
inline CounterexampleInstance build_counterexample(CounterexampleFamily family, int n) {
  if (n < 2)
    throw HolantError(Errc::invalid_argument, "counterexample families need n >= 2");
  std::vector<double> free_sig = {1.0, 1.0};
  if (family == CounterexampleFamily::path_mixed_signatures) {
    Graph g = gen_graph({GenSpec::Kind::path, n + 1, 0, -1}, 0);
    std::vector<Signature> sigs;
    for (int v = 0; v <= n; ++v) {
      if (v == 0 || v == n)
        sigs.push_back(Signature::checked(free_sig));
      else if (v % 2 == 1)
        sigs.push_back(Signature::checked({1.0, 1.0, 0.0}));
      else
        sigs.push_back(Signature::checked({0.0, 1.0, 1.0}));
    }
    std::vector<double> lams(static_cast<std::size_t>(n), 1.0);
    return {family, n, HolantInstance::make(std::move(g), std::move(sigs), std::move(lams)),
            Pinning::empty()};
  }
  // family 2
  Graph g = gen_graph({GenSpec::Kind::pendant_path, n, 0, -1}, 0);
  std::vector<Signature> sigs;
  for (int v = 0; v < 2 * n; ++v) {
    if (v == 0 || v == n)
      sigs.push_back(Signature::checked(free_sig));
    else if (v < n)
      sigs.push_back(Signature::checked({0.0, 1.0, 1.0, 0.0}));
    else
      sigs.push_back(Signature::checked(free_sig));  // pendant vertex, degree 1
  }
  std::vector<double> lams(static_cast<std::size_t>(2 * n - 1), 1.0);
  Pinning pin;
  for (int i = 1; i < n; ++i) pin = pin.with(n - 1 + i, i % 2 == 1);
  return {family, n, HolantInstance::make(std::move(g), std::move(sigs), std::move(lams)),
          std::move(pin)};
}

// Sum of |J(e, f)| over f != e for e = v0v1 (edge id 0), no pinning. For
// family 2 the influence matrix is taken on the pendant-pinned induced
// instance, whose path edges keep ids 0..n-1.
struct RowSumEntry {
  int n = 0;
  double row_sum = 0.0;
};

inline double influence_row_sum_edge0(const HolantInstance& inst) {
  oracle::InfluenceMatrix jm = oracle::influence_matrix(inst, Pinning::empty());
  return jm.abs_row_sum(0);
}

inline std::vector<RowSumEntry> influence_row_sum_growth(CounterexampleFamily family,
                                                         std::span<const int> ns) {
  std::vector<RowSumEntry> out;
  for (int n : ns) {
    CounterexampleInstance ce = build_counterexample(family, n);
    HolantInstance reduced =
        family == CounterexampleFamily::path_with_pendants
            ? ce.inst.induced(ce.pendant_pinning).first
            : ce.inst;
    out.push_back({n, influence_row_sum_edge0(reduced)});
  }
  return out;
}

// Contrast family: the b=1 matching path of the same length; its row sum is
// bounded by 2 (p_max - 1) uniformly in n.
inline double contrast_row_sum(int n) {
  Graph g = gen_graph({GenSpec::Kind::path, n + 1, 0, -1}, 0);
  HolantInstance inst = build_b_matching(g, 1, 1.0);
  return influence_row_sum_edge0(inst);
}

// ---------------------------------------------------------------------------
// Mixing diagnostics

struct MixingRow {
  int m = 0;          // edge count
  long steps = 0;     // steps to TV <= 0.1 (exact) or coalescence step (heuristic)
  bool exact = true;  // false = identical-update coalescence heuristic, not rigorous
};

struct MixingProfile {
  std::vector<MixingRow> rows;
  double fitted_c = 0.0;            // least squares through origin on exact rows
  std::vector<double> residuals;    // steps - c m log m, aligned with rows
};

enum class MixingFamily {
  random_d3_b1,  // random max-degree-3 graphs, 1-matchings
  path_b1,       // paths, 1-matchings
};

// Random max-degree-3 graph with exactly m edges (retries the generator on
// the rare locked configurations).
inline Graph random_d3_graph(int m, std::uint64_t seed) {
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    Graph g = gen_graph({GenSpec::Kind::random, m, 3, m}, split_seed(seed, attempt));
    if (g.edge_count() == m) return g;
  }
  throw HolantError(Errc::invalid_argument, "random graph generation failed to reach m edges");
}

// Identical-update coupling of the chains from the empty and the greedy
// start: same edge pick and same uniform each step; reports the first step
// where the two configurations agree. Not a rigorous mixing bound.
inline long coalescence_steps(const HolantInstance& inst, std::uint64_t seed, long cap) {
  glauber::ChainState a = glauber::make_chain(inst, EdgeConfig(inst.edge_count()), seed);
  glauber::ChainState b = glauber::make_chain(inst, glauber::greedy_max_start(inst), seed);
  if (a.cfg == b.cfg) return 0;
  Rng rng(seed);
  int m = inst.edge_count();
  for (long t = 1; t <= cap; ++t) {
    EdgeId e = static_cast<EdgeId>(rng.next_below(static_cast<std::uint32_t>(m)));
    double u = rng.next_double();
    for (glauber::ChainState* st : {&a, &b}) {
      Edge ed = inst.graph().edge(e);
      int cur = st->cfg.get(e) ? 1 : 0;
      int cu = st->occupancy[static_cast<std::size_t>(ed.u)] - cur;
      int cv = st->occupancy[static_cast<std::size_t>(ed.v)] - cur;
      double p = glauber::heat_bath_p(inst, e, cu, cv);
      int nextv = u < p ? 1 : 0;
      if (nextv != cur) {
        st->cfg.set(e, nextv != 0);
        st->occupancy[static_cast<std::size_t>(ed.u)] += nextv - cur;
        st->occupancy[static_cast<std::size_t>(ed.v)] += nextv - cur;
      }
    }
    if (a.cfg == b.cfg) return t;
  }
  return -1;
}

inline MixingProfile mixing_profile(std::span<const int> sizes, std::uint64_t seed,
                                    MixingFamily family = MixingFamily::random_d3_b1) {
  MixingProfile prof;
  prof.rows.resize(sizes.size());
  std::vector<int> sz(sizes.begin(), sizes.end());
  parallel_for(static_cast<int>(sz.size()), [&](int i) {
    int m = sz[static_cast<std::size_t>(i)];
    Graph g = family == MixingFamily::path_b1
                  ? gen_graph({GenSpec::Kind::path, m + 1, 0, -1}, 0)
                  : random_d3_graph(m, split_seed(seed, static_cast<std::uint64_t>(i)));
    HolantInstance inst = build_b_matching(g, 1, 1.0);
    MixingRow row;
    row.m = m;
    if (m <= oracle::kMaxEdgesSweep) {
      row.exact = true;
      row.steps = oracle::steps_to_tv(inst, EdgeConfig(m), 0.1, 1 << 20);
    } else {
      row.exact = false;
      row.steps = coalescence_steps(inst, split_seed(seed, 1000 + static_cast<std::uint64_t>(i)),
                                    1L << 30);
    }
    prof.rows[static_cast<std::size_t>(i)] = row;
  });
  double sxy = 0.0, sxx = 0.0;
  for (const auto& row : prof.rows) {
    if (!row.exact || row.steps < 0) continue;
    double x = static_cast<double>(row.m) * std::log(static_cast<double>(row.m));
    sxy += x * static_cast<double>(row.steps);
    sxx += x * x;
  }
  prof.fitted_c = sxx > 0.0 ? sxy / sxx : 0.0;
  for (const auto& row : prof.rows) {
    double x = static_cast<double>(row.m) * std::log(static_cast<double>(row.m));
    prof.residuals.push_back(static_cast<double>(row.steps) - prof.fitted_c * x);
  }
  return prof;
}

}  // namespace holant::analysis
