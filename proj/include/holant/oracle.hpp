#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "holant/eig.hpp"
#include "holant/error.hpp"
#include "holant/instance.hpp"
#include "holant/parallel.hpp"
#include "holant/params.hpp"

// Brute-force ground truth on desk-scale instances: exact partition
// functions, marginals, influence matrices and their spectra, lemma
// verification sweeps, and exact Glauber distribution evolution. Everything
// here enumerates 2^m edge subsets, so caps are enforced up front.
namespace holant::oracle {

inline constexpr int kMaxEdgesZ = 28;      // partition function / single marginals
inline constexpr int kMaxEdgesTable = 20;  // full weight table
inline constexpr int kMaxEdgesSweep = 14;  // all-pinnings sweeps, chain evolution
inline constexpr int kMaxEdgesSlem = 10;   // dense transition-operator spectrum

namespace detail {

// i-th lowest set bit spread: deposits the bits of `index` into the set
// positions of `mask` (software PDEP; masks are <= 28 bits here).
inline std::uint32_t deposit_bits(std::uint32_t index, std::uint32_t mask) {
  std::uint32_t out = 0;
  while (mask) {
    std::uint32_t bit = mask & (~mask + 1);
    if (index & 1u) out |= bit;
    index >>= 1;
    mask &= mask - 1;
  }
  return out;
}

}  // namespace detail

// Sum of configuration weights over all configs agreeing with `value_mask`
// on `domain_mask`. Enumerates the free subspace directly; parallelized in
// fixed-size blocks with a fixed-shape reduction tree so the result does not
// depend on the worker count.
inline double restricted_sum(const HolantInstance& inst, std::uint32_t domain_mask,
                             std::uint32_t value_mask) {
  int m = inst.edge_count();
  if (m > kMaxEdgesZ)
    throw HolantError(Errc::too_large,
                      "enumeration cap exceeded: " + std::to_string(m) + " edges > cap " +
                          std::to_string(kMaxEdgesZ));
  auto vmasks = inst.graph().incidence_masks();
  std::uint32_t full = m == 32 ? 0xffffffffu : ((1u << m) - 1u);
  std::uint32_t free_mask = full & ~domain_mask;
  std::uint32_t pinned = value_mask & domain_mask;
  int f = __builtin_popcount(free_mask);
  std::uint64_t total = 1ull << f;
  constexpr std::uint64_t kBlock = 1ull << 16;
  if (total <= kBlock) {
    double acc = 0.0;
    std::uint32_t s = 0;
    while (true) {
      acc += inst.weight_mask(pinned | s, vmasks);
      if (s == free_mask) break;
      s = (s - free_mask) & free_mask;
    }
    return acc;
  }
  int blocks = static_cast<int>((total + kBlock - 1) / kBlock);
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
  parallel_for(blocks, [&](int b) {
    std::uint64_t lo = static_cast<std::uint64_t>(b) * kBlock;
    std::uint64_t hi = std::min(total, lo + kBlock);
    std::uint32_t s = detail::deposit_bits(static_cast<std::uint32_t>(lo), free_mask);
    double acc = 0.0;
    for (std::uint64_t i = lo; i < hi; ++i) {
      acc += inst.weight_mask(pinned | s, vmasks);
      s = (s - free_mask) & free_mask;
    }
    partial[static_cast<std::size_t>(b)] = acc;
  });
  return tree_sum(partial);
}

// Z = sum over all 2^m subsets; positive whenever the instance has positive
// weight anywhere (always true for f_v(0) > 0 instances via the empty set).
inline double partition_function(const HolantInstance& inst) {
  return restricted_sum(inst, 0, 0);
}

// Full weight table over 2^m configurations.
class WeightTable {
public:
  explicit WeightTable(const HolantInstance& inst, int cap = kMaxEdgesTable)
      : inst_(&inst), m_(inst.edge_count()) {
    if (m_ > cap || m_ > kMaxEdgesTable)
      throw HolantError(Errc::too_large,
                        "enumeration cap exceeded: " + std::to_string(m_) + " edges > cap " +
                            std::to_string(std::min(cap, kMaxEdgesTable)));
    vmasks_ = inst.graph().incidence_masks();
    w_.resize(1ull << m_);
    for (std::uint64_t cfg = 0; cfg < w_.size(); ++cfg)
      w_[cfg] = inst.weight_mask(static_cast<std::uint32_t>(cfg), vmasks_);
    z_ = 0.0;
    for (double x : w_) z_ += x;
  }

  const HolantInstance& instance() const { return *inst_; }
  int edge_count() const { return m_; }
  double z() const { return z_; }
  double weight(std::uint32_t cfg) const { return w_[cfg]; }
  std::span<const double> weights() const { return w_; }
  std::span<const std::uint32_t> vertex_masks() const { return vmasks_; }

  std::vector<std::uint32_t> support() const {
    std::vector<std::uint32_t> s;
    for (std::uint64_t cfg = 0; cfg < w_.size(); ++cfg)
      if (w_[cfg] > 0.0) s.push_back(static_cast<std::uint32_t>(cfg));
    return s;
  }

private:
  const HolantInstance* inst_;
  int m_;
  std::vector<std::uint32_t> vmasks_;
  std::vector<double> w_;
  double z_;
};

// Per-pinning accumulation over the free subspace. All four families of sums
// are accumulated directly (not differenced), so deterministic marginals are
// detected exactly: a sum of non-negative weights is zero iff every term is.
struct PinStats {
  std::vector<EdgeId> basis;  // free edges, ascending
  double z = 0.0;
  std::vector<double> occ;     // occ[i]  = sum of w over configs with basis[i] occupied
  std::vector<double> occ0;    // occ0[i] = sum of w over configs with basis[i] unoccupied
  std::vector<double> joint;   // joint[i*dim+j]  = sum of w with both i and j occupied
  std::vector<double> joint0;  // joint0[i*dim+j] = sum of w with i unoccupied, j occupied

  int dim() const { return static_cast<int>(basis.size()); }
};

inline PinStats pin_stats(const WeightTable& table, std::uint32_t domain_mask,
                          std::uint32_t value_mask) {
  int m = table.edge_count();
  std::uint32_t full = (m == 32) ? 0xffffffffu : ((1u << m) - 1u);
  std::uint32_t free_mask = full & ~domain_mask;
  std::uint32_t pinned = value_mask & domain_mask;
  PinStats st;
  for (int e = 0; e < m; ++e)
    if (free_mask & (1u << e)) st.basis.push_back(e);
  int dim = st.dim();
  st.occ.assign(static_cast<std::size_t>(dim), 0.0);
  st.occ0.assign(static_cast<std::size_t>(dim), 0.0);
  st.joint.assign(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), 0.0);
  st.joint0.assign(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), 0.0);
  std::vector<int> pos(static_cast<std::size_t>(m), -1);
  for (int i = 0; i < dim; ++i) pos[static_cast<std::size_t>(st.basis[i])] = i;

  std::uint32_t s = 0;
  std::vector<int> set_idx, clear_idx;
  set_idx.reserve(static_cast<std::size_t>(dim));
  clear_idx.reserve(static_cast<std::size_t>(dim));
  while (true) {
    double w = table.weight(pinned | s);
    if (w > 0.0) {
      st.z += w;
      set_idx.clear();
      clear_idx.clear();
      for (int i = 0; i < dim; ++i) {
        if (s & (1u << st.basis[i]))
          set_idx.push_back(i);
        else
          clear_idx.push_back(i);
      }
      for (std::size_t a = 0; a < set_idx.size(); ++a) {
        int i = set_idx[a];
        st.occ[static_cast<std::size_t>(i)] += w;
        for (std::size_t b = 0; b < set_idx.size(); ++b) {
          int j = set_idx[b];
          st.joint[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim) +
                   static_cast<std::size_t>(j)] += w;
        }
      }
      for (int i : clear_idx) {
        st.occ0[static_cast<std::size_t>(i)] += w;
        for (int j : set_idx)
          st.joint0[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim) +
                    static_cast<std::size_t>(j)] += w;
      }
    }
    if (s == free_mask) break;
    s = (s - free_mask) & free_mask;
  }
  return st;
}

// mu^tau(sigma_e = 1). Works up to kMaxEdgesZ via restricted sums.
inline double marginal(const HolantInstance& inst, const Pinning& pin, EdgeId e) {
  if (e < 0 || e >= inst.edge_count())
    throw HolantError(Errc::invalid_argument, "edge id out of range");
  if (pin.contains(e))
    throw HolantError(Errc::invalid_argument, "edge is pinned");
  std::uint32_t dom = pin.domain_mask(), val = pin.value_mask();
  double den = restricted_sum(inst, dom, val);
  if (!(den > 0.0))
    throw HolantError(Errc::zero_probability_pinning, "pinning has zero probability");
  double num = restricted_sum(inst, dom | (1u << e), val | (1u << e));
  return num / den;
}

// Influence matrix under a pinning: J(e,f) = mu^tau(sigma_f=1 | sigma_e=1)
// - mu^tau(sigma_f=1 | sigma_e=0) for e != f when both conditionings have
// positive probability, 0 otherwise.
struct InfluenceMatrix {
  std::vector<EdgeId> basis;
  int dim = 0;
  std::vector<double> a;  // row-major dim x dim

  double at(int i, int j) const {
    return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim) +
             static_cast<std::size_t>(j)];
  }
  double abs_row_sum(int i) const {
    double r = 0.0;
    for (int j = 0; j < dim; ++j) r += std::fabs(at(i, j));
    return r;
  }
  bool all_zero() const {
    for (double x : a)
      if (x != 0.0) return false;
    return true;
  }
};

inline InfluenceMatrix influence_from_stats(const PinStats& st) {
  InfluenceMatrix jm;
  jm.basis = st.basis;
  jm.dim = st.dim();
  jm.a.assign(static_cast<std::size_t>(jm.dim) * static_cast<std::size_t>(jm.dim), 0.0);
  for (int i = 0; i < jm.dim; ++i) {
    double occ = st.occ[static_cast<std::size_t>(i)];
    double occ0 = st.occ0[static_cast<std::size_t>(i)];
    if (!(occ > 0.0) || !(occ0 > 0.0)) continue;  // deterministic edge: zero row
    for (int j = 0; j < jm.dim; ++j) {
      if (i == j) continue;
      std::size_t ij = static_cast<std::size_t>(i) * static_cast<std::size_t>(jm.dim) +
                       static_cast<std::size_t>(j);
      jm.a[ij] = st.joint[ij] / occ - st.joint0[ij] / occ0;
    }
  }
  return jm;
}

inline InfluenceMatrix influence_matrix(const HolantInstance& inst, const Pinning& pin) {
  if (inst.edge_count() > kMaxEdgesSweep)
    throw HolantError(Errc::too_large,
                      "enumeration cap exceeded: " + std::to_string(inst.edge_count()) +
                          " edges > cap " + std::to_string(kMaxEdgesSweep));
  WeightTable table(inst);
  PinStats st = pin_stats(table, pin.domain_mask(), pin.value_mask());
  if (!(st.z > 0.0))
    throw HolantError(Errc::zero_probability_pinning, "pinning has zero probability");
  return influence_from_stats(st);
}

// Largest real eigenvalue of J, asserting the spectrum is real up to
// imag <= 1e-8 * spectral radius (the influence matrix of a Gibbs
// distribution is similar to a symmetric matrix, so this is a consistency
// check on the solver, not a modeling assumption).
inline double influence_lambda_max(const InfluenceMatrix& jm) {
  if (jm.dim == 0 || jm.all_zero()) return 0.0;
  Spectrum sp = eig_general(jm.a, jm.dim);
  double rad = sp.spectral_radius();
  if (sp.max_abs_imag() > std::max(1e-8 * rad, 1e-12))
    throw HolantError(Errc::invalid_argument,
                      "influence matrix produced complex eigenvalues beyond tolerance");
  return sp.max_real();
}

// Visits every feasible pinning (positive conditional mass) of the instance
// in the deterministic order (domain mask ascending, value submask in
// submask-enumeration order). The callback receives a running pinning id.
template <class F>
void for_each_feasible_pinning(const WeightTable& table, F&& f) {
  int m = table.edge_count();
  if (m > kMaxEdgesSweep)
    throw HolantError(Errc::too_large,
                      "all-pinnings sweep cap exceeded: " + std::to_string(m) +
                          " edges > cap " + std::to_string(kMaxEdgesSweep));
  std::uint32_t full = (1u << m) - 1u;
  long pin_id = 0;
  for (std::uint32_t dom = 0;; ++dom) {
    std::uint32_t val = 0;
    while (true) {
      PinStats st = pin_stats(table, dom, val);
      if (st.z > 0.0) {
        f(pin_id, dom, val, st);
        ++pin_id;
      }
      if (val == dom) break;
      val = (val - dom) & dom;
    }
    if (dom == full) break;
  }
}

// max over all feasible pinnings tau of lambda_max(J^tau).
inline double spectral_independence_constant(const HolantInstance& inst) {
  WeightTable table(inst, kMaxEdgesSweep);
  double best = 0.0;
  for_each_feasible_pinning(table, [&](long, std::uint32_t, std::uint32_t,
                                       const PinStats& st) {
    if (st.dim() <= 1) return;
    InfluenceMatrix jm = influence_from_stats(st);
    if (jm.all_zero()) return;
    best = std::max(best, influence_lambda_max(jm));
  });
  return best;
}

// ---------------------------------------------------------------------------
// Bound verification reports

struct AllZeroRow {
  VertexId v;
  double lhs;  // exact mu(sigma_{E_v} = 0)
  double rhs;  // 1 / P_{f_v}(r_max lambda_max)
  bool pass;
};

inline std::vector<AllZeroRow> verify_all_zero_bound(const HolantInstance& inst) {
  InstanceParams params = compute_params(inst);
  double z = partition_function(inst);
  double x = params.r_max * params.lambda_max;
  std::vector<AllZeroRow> rows;
  for (VertexId v = 0; v < inst.vertex_count(); ++v) {
    std::uint32_t ev = 0;
    for (EdgeId e : inst.graph().incident_edges(v)) ev |= (1u << e);
    double lhs = restricted_sum(inst, ev, 0) / z;
    double rhs = 1.0 / inst.sig(v).gen_poly(x);
    rows.push_back({v, lhs, rhs, lhs >= rhs - 1e-12});
  }
  return rows;
}

struct MarginalBoundRow {
  long pin_id;
  EdgeId e;
  // check: 0 -> mu(sigma_e=0) >= 1/p_max; 1 -> mu(sigma_e=1) >= r_min^2
  // lambda_min / p_max^2; 2 -> edge cannot be occupied, mu(sigma_e=1) == 0.
  int check;
  double lhs;
  double rhs;
  bool pass;
};

inline std::vector<MarginalBoundRow> verify_marginal_bounds(const HolantInstance& inst) {
  InstanceParams params = compute_params(inst);
  WeightTable table(inst, kMaxEdgesSweep);
  std::vector<MarginalBoundRow> rows;
  double rhs0 = 1.0 / params.p_max;
  for_each_feasible_pinning(table, [&](long pin_id, std::uint32_t, std::uint32_t,
                                       const PinStats& st) {
    for (int i = 0; i < st.dim(); ++i) {
      EdgeId e = st.basis[static_cast<std::size_t>(i)];
      double mu1 = st.occ[static_cast<std::size_t>(i)] / st.z;
      double mu0 = st.occ0[static_cast<std::size_t>(i)] / st.z;
      if (st.occ[static_cast<std::size_t>(i)] > 0.0) {
        double rhs1 =
            params.r_min * params.r_min * params.lambda_min / (params.p_max * params.p_max);
        rows.push_back({pin_id, e, 0, mu0, rhs0, mu0 >= rhs0 - 1e-12});
        rows.push_back({pin_id, e, 1, mu1, rhs1, mu1 >= rhs1 - 1e-12});
      } else {
        rows.push_back({pin_id, e, 2, mu1, 0.0, mu1 == 0.0});
      }
    }
  });
  return rows;
}

// ---------------------------------------------------------------------------
// Exact Glauber evolution

// One heat-bath transition applied to an exact distribution over 2^m. The
// chain picks a uniform edge and resamples it from its conditional law.
inline void apply_transition(const WeightTable& table, std::span<const std::uint32_t> support,
                             const std::vector<double>& in, std::vector<double>& out) {
  int m = table.edge_count();
  double inv_m = 1.0 / m;
  std::fill(out.begin(), out.end(), 0.0);
  for (std::uint32_t s : support) {
    double mass = in[s];
    if (mass == 0.0) continue;
    for (int e = 0; e < m; ++e) {
      std::uint32_t bit = 1u << e;
      double w1 = table.weight(s | bit);
      double w0 = table.weight(s & ~bit);
      double p = w1 / (w0 + w1);
      if (p > 0.0) out[s | bit] += mass * inv_m * p;
      if (p < 1.0) out[s & ~bit] += mass * inv_m * (1.0 - p);
    }
  }
}

struct ChainEvolution {
  std::vector<double> tv;  // tv[t] = total variation to stationarity after t+1 steps
  double slem = std::numeric_limits<double>::quiet_NaN();
  bool slem_computed = false;
};

// Second-largest eigenvalue modulus of the transition operator restricted to
// the support. Reversibility makes D^{1/2} P D^{-1/2} symmetric, which the
// Jacobi solver handles exactly.
inline double transition_slem(const WeightTable& table) {
  int m = table.edge_count();
  if (m > kMaxEdgesSlem)
    throw HolantError(Errc::too_large, "SLEM cap exceeded");
  auto support = table.support();
  int nstates = static_cast<int>(support.size());
  std::vector<int> index(1ull << m, -1);
  for (int i = 0; i < nstates; ++i) index[support[static_cast<std::size_t>(i)]] = i;
  std::vector<double> pm(static_cast<std::size_t>(nstates) * static_cast<std::size_t>(nstates),
                         0.0);
  double inv_m = 1.0 / m;
  for (int i = 0; i < nstates; ++i) {
    std::uint32_t s = support[static_cast<std::size_t>(i)];
    for (int e = 0; e < m; ++e) {
      std::uint32_t bit = 1u << e;
      double w1 = table.weight(s | bit);
      double w0 = table.weight(s & ~bit);
      double p = w1 / (w0 + w1);
      int j1 = index[s | bit];
      int j0 = index[s & ~bit];
      if (p > 0.0)
        pm[static_cast<std::size_t>(i) * static_cast<std::size_t>(nstates) +
           static_cast<std::size_t>(j1)] += inv_m * p;
      if (p < 1.0)
        pm[static_cast<std::size_t>(i) * static_cast<std::size_t>(nstates) +
           static_cast<std::size_t>(j0)] += inv_m * (1.0 - p);
    }
  }
  // Symmetrize by similarity with D^{1/2}, D = diag(pi).
  std::vector<double> sym = pm;
  for (int i = 0; i < nstates; ++i) {
    double pi_i = table.weight(support[static_cast<std::size_t>(i)]);
    for (int j = 0; j < nstates; ++j) {
      double pi_j = table.weight(support[static_cast<std::size_t>(j)]);
      sym[static_cast<std::size_t>(i) * static_cast<std::size_t>(nstates) +
          static_cast<std::size_t>(j)] =
          pm[static_cast<std::size_t>(i) * static_cast<std::size_t>(nstates) +
             static_cast<std::size_t>(j)] *
          std::sqrt(pi_i / pi_j);
    }
  }
  // Enforce exact symmetry before Jacobi.
  for (int i = 0; i < nstates; ++i)
    for (int j = i + 1; j < nstates; ++j) {
      std::size_t ij = static_cast<std::size_t>(i) * static_cast<std::size_t>(nstates) +
                       static_cast<std::size_t>(j);
      std::size_t ji = static_cast<std::size_t>(j) * static_cast<std::size_t>(nstates) +
                       static_cast<std::size_t>(i);
      double avg = 0.5 * (sym[ij] + sym[ji]);
      sym[ij] = sym[ji] = avg;
    }
  auto ev = eig_symmetric(std::move(sym), nstates);
  std::vector<double> mods;
  for (double x : ev) mods.push_back(std::fabs(x));
  std::sort(mods.begin(), mods.end(), std::greater<double>());
  return mods.size() >= 2 ? mods[1] : 0.0;
}

inline ChainEvolution chain_distribution_evolution(const HolantInstance& inst,
                                                   const EdgeConfig& start, int steps) {
  int m = inst.edge_count();
  if (m > kMaxEdgesSweep)
    throw HolantError(Errc::too_large,
                      "chain evolution cap exceeded: " + std::to_string(m) + " edges > cap " +
                          std::to_string(kMaxEdgesSweep));
  WeightTable table(inst, kMaxEdgesSweep);
  std::uint32_t s0 = static_cast<std::uint32_t>(start.low_mask());
  if (!(table.weight(s0) > 0.0))
    throw HolantError(Errc::infeasible_start, "start configuration has zero weight");
  auto support = table.support();
  std::vector<double> dist(1ull << m, 0.0), nextd(1ull << m, 0.0);
  dist[s0] = 1.0;
  ChainEvolution ev;
  ev.tv.reserve(static_cast<std::size_t>(steps));
  for (int t = 0; t < steps; ++t) {
    apply_transition(table, support, dist, nextd);
    dist.swap(nextd);
    double tv = 0.0;
    for (std::uint32_t s : support) tv += std::fabs(dist[s] - table.weight(s) / table.z());
    ev.tv.push_back(0.5 * tv);
  }
  if (m <= kMaxEdgesSlem) {
    ev.slem = transition_slem(table);
    ev.slem_computed = true;
  }
  return ev;
}

// First step count t with TV(dist_t, pi) <= target; -1 if not reached.
inline int steps_to_tv(const HolantInstance& inst, const EdgeConfig& start, double target,
                       int max_steps) {
  int m = inst.edge_count();
  if (m > kMaxEdgesSweep)
    throw HolantError(Errc::too_large, "chain evolution cap exceeded");
  WeightTable table(inst, kMaxEdgesSweep);
  std::uint32_t s0 = static_cast<std::uint32_t>(start.low_mask());
  if (!(table.weight(s0) > 0.0))
    throw HolantError(Errc::infeasible_start, "start configuration has zero weight");
  auto support = table.support();
  std::vector<double> dist(1ull << m, 0.0), nextd(1ull << m, 0.0);
  dist[s0] = 1.0;
  for (int t = 1; t <= max_steps; ++t) {
    apply_transition(table, support, dist, nextd);
    dist.swap(nextd);
    double tv = 0.0;
    for (std::uint32_t s : support) tv += std::fabs(dist[s] - table.weight(s) / table.z());
    if (0.5 * tv <= target) return t;
  }
  return -1;
}

// L1 residual of pi P = pi.
inline double stationarity_residual(const HolantInstance& inst) {
  WeightTable table(inst, kMaxEdgesSweep);
  auto support = table.support();
  int m = table.edge_count();
  std::vector<double> pi(1ull << m, 0.0), out(1ull << m, 0.0);
  for (std::uint32_t s : support) pi[s] = table.weight(s) / table.z();
  apply_transition(table, support, pi, out);
  double r = 0.0;
  for (std::uint32_t s : support) r += std::fabs(out[s] - pi[s]);
  return r;
}

// max over state pairs of |pi(x)P(x,y) - pi(y)P(y,x)|.
inline double detailed_balance_violation(const HolantInstance& inst) {
  WeightTable table(inst, kMaxEdgesSweep);
  auto support = table.support();
  int m = table.edge_count();
  double inv_m = 1.0 / m;
  double worst = 0.0;
  for (std::uint32_t s : support) {
    for (int e = 0; e < m; ++e) {
      std::uint32_t bit = 1u << e;
      if (s & bit) continue;
      std::uint32_t x = s, y = s | bit;
      double w0 = table.weight(x), w1 = table.weight(y);
      if (!(w0 > 0.0) || !(w1 > 0.0)) continue;
      double fwd = (w0 / table.z()) * inv_m * (w1 / (w0 + w1));
      double bwd = (w1 / table.z()) * inv_m * (w0 / (w0 + w1));
      worst = std::max(worst, std::fabs(fwd - bwd));
    }
  }
  return worst;
}

// Per-edge occupation marginals of the unpinned distribution.
inline std::vector<double> edge_marginals(const HolantInstance& inst) {
  WeightTable table(inst);
  PinStats st = pin_stats(table, 0, 0);
  std::vector<double> mu(static_cast<std::size_t>(inst.edge_count()), 0.0);
  for (int i = 0; i < st.dim(); ++i)
    mu[static_cast<std::size_t>(st.basis[i])] = st.occ[static_cast<std::size_t>(i)] / st.z;
  return mu;
}

// E_mu |sigma cap E_v|, used by the shift monotonicity lemma checks.
inline double expected_occupancy(const HolantInstance& inst, VertexId v) {
  WeightTable table(inst);
  std::uint32_t ev = 0;
  for (EdgeId e : inst.graph().incident_edges(v)) ev |= (1u << e);
  double acc = 0.0;
  for (std::uint64_t cfg = 0; cfg < (1ull << table.edge_count()); ++cfg) {
    double w = table.weight(static_cast<std::uint32_t>(cfg));
    if (w > 0.0) acc += w * __builtin_popcount(static_cast<std::uint32_t>(cfg) & ev);
  }
  return acc / table.z();
}

// Exact total variation distance between the Gibbs distributions of two
// instances on the same edge index set.
inline double tv_between(const HolantInstance& a, const HolantInstance& b) {
  if (a.edge_count() != b.edge_count())
    throw HolantError(Errc::invalid_argument, "edge count mismatch");
  WeightTable ta(a), tb(b);
  double tv = 0.0;
  for (std::uint64_t cfg = 0; cfg < (1ull << a.edge_count()); ++cfg)
    tv += std::fabs(ta.weight(static_cast<std::uint32_t>(cfg)) / ta.z() -
                    tb.weight(static_cast<std::uint32_t>(cfg)) / tb.z());
  return 0.5 * tv;
}

}  // namespace holant::oracle
