#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "holant/error.hpp"
#include "holant/instance.hpp"
#include "holant/oracle.hpp"
#include "holant/rng.hpp"

// The recursive coupling between mu_{G,f,lambda} and mu_{G,D_v f,lambda}:
// pick the smallest edge e in E_v whose occupation marginal dominates the
// shifted instance's, couple the two Bernoullis monotonically through one
// shared uniform (so (0,1) can never occur), and recurse on the three cases
// (both unoccupied: drop e; both occupied: drop e and shift both endpoints;
// split: the disagreement moves to the other endpoint and the roles swap).
//
// The recursion is flattened into a walk over a lazily expanded tree of
// subproblem states, memoized on (removed edges, per-vertex shift counts,
// disagreement vertex). Marginals come from the exact oracle, so the cap is
// kMaxEdgesCouple; this is a verification instrument, not a production
// sampler.
namespace holant::coupling {

inline constexpr int kMaxEdgesCouple = 20;

struct CoupleTrace {
  EdgeConfig first;   // sigma  ~ mu_{G,f,lambda}
  EdgeConfig second;  // sigma' ~ mu_{G,D_v f,lambda}
  int hamming = 0;
  bool halted_by_case2 = false;  // closed with all of E_v unoccupied, no split
  int recursion_depth = 0;
};

class CouplingTree {
public:
  CouplingTree(const HolantInstance& inst, VertexId v) : inst_(inst), v0_(v) {
    int m = inst.edge_count();
    if (m > kMaxEdgesCouple)
      throw HolantError(Errc::too_large,
                        "coupling cap exceeded: " + std::to_string(m) + " edges > cap " +
                            std::to_string(kMaxEdgesCouple));
    if (v < 0 || v >= inst.vertex_count())
      throw HolantError(Errc::invalid_argument, "vertex id out of range");
    if (!inst.positive_at_empty())
      throw HolantError(Errc::precondition_violated,
                        "coupling requires f_v(0) > 0 for all vertices");
    // An isolated v makes the coupling the identity; the f_v(1) > 0
    // hypothesis only matters when v has edges to disagree on.
    if (inst.graph().degree(v) > 0 && !(inst.sig(v)(1) > 0.0))
      throw HolantError(Errc::precondition_violated,
                        "coupling requires f_v(1) > 0 at the disagreement vertex");
    full_mask_ = m == 0 ? 0u : ((1u << m) - 1u);
    vmasks_ = inst.graph().incidence_masks();
    NodeState root;
    root.removed = 0;
    root.shifts.assign(static_cast<std::size_t>(inst.vertex_count()), 0);
    root.v = v;
    root_ = expand(root);
  }

  CoupleTrace sample(Rng& rng) {
    int m = inst_.edge_count();
    CoupleTrace tr;
    tr.first = EdgeConfig(m);
    tr.second = EdgeConfig(m);
    bool swap = false;
    bool any_split = false;
    int idx = root_;
    while (true) {
      // child() can grow nodes_, so snapshot the fields before branching
      if (nodes_[static_cast<std::size_t>(idx)].base) {
        const Node& node = nodes_[static_cast<std::size_t>(idx)];
        double target = rng.next_double() * node.zbase;
        std::uint32_t s = base_pick(node, target);
        scatter(s, tr.first);
        scatter(s, tr.second);
        break;
      }
      EdgeId e = nodes_[static_cast<std::size_t>(idx)].e;
      double p = nodes_[static_cast<std::size_t>(idx)].p;
      double q = nodes_[static_cast<std::size_t>(idx)].q;
      double u = rng.next_double();
      bool first_bit = u < p;
      bool second_bit = u < q;
      tr.first.set(e, swap ? second_bit : first_bit);
      tr.second.set(e, swap ? first_bit : second_bit);
      ++tr.recursion_depth;
      int branch;
      if (second_bit) {
        branch = 1;  // both occupied
      } else if (first_bit) {
        branch = 2;  // split: disagreement moves across e
        any_split = true;
        swap = !swap;
      } else {
        branch = 0;  // both unoccupied
      }
      idx = child(idx, branch);
    }
    tr.hamming = tr.first.hamming_distance(tr.second);
    bool ev_clear = true;
    for (EdgeId e : inst_.graph().incident_edges(v0_))
      if (tr.first.get(e) || tr.second.get(e)) ev_clear = false;
    tr.halted_by_case2 = !any_split && ev_clear;
    return tr;
  }

  // Draws the second component conditioned on the first component equalling
  // t. Exact: branch posteriors are reweighted by the probability that the
  // subtree's first component completes t. Requires t to be a support point
  // of the first marginal. Returns the sample plus whether a split occurred.
  std::pair<EdgeConfig, bool> sample_second_given_first(const EdgeConfig& t, Rng& rng) {
    std::uint32_t tmask = static_cast<std::uint32_t>(t.low_mask());
    if (!(pfirst(root_, tmask, false) > 0.0))
      throw HolantError(Errc::precondition_violated,
                        "conditioning configuration has zero probability under the coupling");
    EdgeConfig out(inst_.edge_count());
    bool swap = false;
    bool any_split = false;
    int idx = root_;
    while (true) {
      // child()/pfirst() can grow nodes_, so snapshot fields before use
      if (nodes_[static_cast<std::size_t>(idx)].base) {
        scatter(tmask & nodes_[static_cast<std::size_t>(idx)].free_mask, out);
        break;
      }
      EdgeId e = nodes_[static_cast<std::size_t>(idx)].e;
      double p = nodes_[static_cast<std::size_t>(idx)].p;
      double q = nodes_[static_cast<std::size_t>(idx)].q;
      bool te = (tmask >> e) & 1u;
      // Branch weights consistent with the forced first-component value.
      double w0 = 0.0, w1 = 0.0, w2 = 0.0;
      if (!swap) {
        if (te) {
          w1 = q > 0.0 ? q * pfirst(child(idx, 1), tmask, swap) : 0.0;
          w2 = p - q > 0.0 ? (p - q) * pfirst(child(idx, 2), tmask, !swap) : 0.0;
        } else {
          w0 = 1.0 - p > 0.0 ? (1.0 - p) * pfirst(child(idx, 0), tmask, swap) : 0.0;
        }
      } else {
        if (te) {
          w1 = q > 0.0 ? q * pfirst(child(idx, 1), tmask, swap) : 0.0;
        } else {
          w0 = 1.0 - p > 0.0 ? (1.0 - p) * pfirst(child(idx, 0), tmask, swap) : 0.0;
          w2 = p - q > 0.0 ? (p - q) * pfirst(child(idx, 2), tmask, !swap) : 0.0;
        }
      }
      double total = w0 + w1 + w2;
      if (!(total > 0.0))
        throw HolantError(Errc::precondition_violated,
                          "conditioning configuration unreachable in coupling tree");
      double u = rng.next_double() * total;
      int branch = (u < w1) ? 1 : (u < w1 + w2 ? 2 : 0);
      // second component value of this edge under the chosen branch
      bool second_local = branch == 1;                       // local pair (1,1)
      bool first_local = branch != 0;                        // (1,*) for branches 1,2
      bool second_global = swap ? first_local : second_local;
      out.set(e, second_global);
      if (branch == 2) {
        any_split = true;
        swap = !swap;
      }
      idx = child(idx, branch);
    }
    return {out, any_split};
  }

  const HolantInstance& instance() const { return inst_; }
  VertexId disagreement_vertex() const { return v0_; }

  int node_count() const { return static_cast<int>(nodes_.size()); }

  // Structural never-crossing invariant: every expanded branch node has
  // 0 <= q <= p <= 1, which makes the local outcome (0, 1) impossible
  // under the shared-uniform draw.
  bool nodes_monotone() const {
    for (const Node& node : nodes_) {
      if (node.base) continue;
      if (!(node.q >= 0.0 && node.q <= node.p && node.p <= 1.0)) return false;
    }
    return true;
  }

private:
  struct NodeState {
    std::uint32_t removed = 0;
    std::vector<std::uint8_t> shifts;
    VertexId v = 0;

    std::string key() const {
      std::string k;
      k.reserve(shifts.size() + 8);
      for (int i = 0; i < 4; ++i) k.push_back(static_cast<char>((removed >> (8 * i)) & 0xff));
      for (int i = 0; i < 4; ++i)
        k.push_back(static_cast<char>((static_cast<std::uint32_t>(v) >> (8 * i)) & 0xff));
      for (std::uint8_t s : shifts) k.push_back(static_cast<char>(s));
      return k;
    }
  };

  struct Node {
    NodeState state;
    bool base = false;
    // branch node
    EdgeId e = -1;
    double p = 0.0, q = 0.0;  // mu_e(1) and mu'_e(1), clamped to p >= q
    int children[3] = {-1, -1, -1};
    // base node
    std::uint32_t free_mask = 0;
    double zbase = 0.0;
    std::vector<double> cdf;  // cumulative weights by submask rank
    // glue memo: key = (t restricted to free edges) * 2 + swap
    std::unordered_map<std::uint64_t, double> pfirst_memo;
  };

  double cur_sig(const NodeState& st, VertexId v, int count) const {
    return inst_.sig(v)(st.shifts[static_cast<std::size_t>(v)] + count);
  }

  // Weight of free-subconfig s under the current mu side; mu' differs only
  // in the disagreement vertex's factor (one extra shift).
  void config_weights(const NodeState& st, std::uint32_t s, double& w_mu,
                      double& w_mu_shift) const {
    double base = 1.0;
    for (VertexId v = 0; v < inst_.vertex_count(); ++v) {
      if (v == st.v) continue;
      base *= cur_sig(st, v, __builtin_popcount(s & vmasks_[static_cast<std::size_t>(v)]));
      if (base == 0.0) break;
    }
    if (base > 0.0) {
      std::uint32_t rest = s;
      while (rest) {
        int e = __builtin_ctz(rest);
        rest &= rest - 1;
        base *= inst_.lambda(e);
      }
    }
    int cv = __builtin_popcount(s & vmasks_[static_cast<std::size_t>(st.v)]);
    w_mu = base * cur_sig(st, st.v, cv);
    w_mu_shift = base * inst_.sig(st.v)(st.shifts[static_cast<std::size_t>(st.v)] + 1 + cv);
  }

  int expand(const NodeState& st) {
    auto key = st.key();
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    Node node;
    node.state = st;
    std::uint32_t free_mask = full_mask_ & ~st.removed;
    std::uint32_t ev = vmasks_[static_cast<std::size_t>(st.v)] & free_mask;
    if (ev == 0) {
      node.base = true;
      node.free_mask = free_mask;
      double acc = 0.0;
      std::uint32_t s = 0;
      while (true) {
        double w, wshift;
        config_weights(st, s, w, wshift);
        acc += w;
        node.cdf.push_back(acc);
        if (s == free_mask) break;
        s = (s - free_mask) & free_mask;
      }
      node.zbase = acc;
      if (!(node.zbase > 0.0))
        throw HolantError(Errc::precondition_violated,
                          "coupling reached a zero-mass subproblem");
      // The mu' side must also be normalizable; with v isolated its factor
      // is the constant f_v(shift+1), positive on every reachable branch.
      // (Exception: a vertex isolated in the original graph, where the
      // coupling is the identity and mu' plays no role.)
      if (inst_.graph().degree(st.v) > 0 &&
          !(inst_.sig(st.v)(st.shifts[static_cast<std::size_t>(st.v)] + 1) > 0.0))
        throw HolantError(Errc::precondition_violated,
                          "coupling reached a subproblem with vanishing shifted signature");
    } else {
      double z = 0.0, zshift = 0.0;
      int ecount = __builtin_popcount(ev);
      std::vector<double> occ(static_cast<std::size_t>(ecount), 0.0);
      std::vector<double> occ_shift(static_cast<std::size_t>(ecount), 0.0);
      std::vector<EdgeId> cand;
      for (int e = 0; e < inst_.edge_count(); ++e)
        if (ev & (1u << e)) cand.push_back(e);
      std::uint32_t s = 0;
      while (true) {
        double w, wshift;
        config_weights(st, s, w, wshift);
        if (w > 0.0 || wshift > 0.0) {
          z += w;
          zshift += wshift;
          for (std::size_t i = 0; i < cand.size(); ++i) {
            if (s & (1u << cand[i])) {
              occ[i] += w;
              occ_shift[i] += wshift;
            }
          }
        }
        if (s == free_mask) break;
        s = (s - free_mask) & free_mask;
      }
      if (!(z > 0.0) || !(zshift > 0.0))
        throw HolantError(Errc::precondition_violated,
                          "coupling reached a zero-mass subproblem");
      int chosen = -1;
      double best_gap = -std::numeric_limits<double>::infinity();
      int best_i = -1;
      for (std::size_t i = 0; i < cand.size(); ++i) {
        double p = occ[i] / z;
        double q = occ_shift[i] / zshift;
        if (chosen < 0 && p >= q - 1e-12) {
          chosen = static_cast<int>(i);
          break;
        }
        if (p - q > best_gap) {
          best_gap = p - q;
          best_i = static_cast<int>(i);
        }
      }
      if (chosen < 0) {
        // The monotone edge exists by the log-concavity lemma; only floating
        // noise can land here, and then the least-bad candidate is it.
        if (best_gap < -1e-9)
          throw HolantError(Errc::precondition_violated,
                            "no dominating edge found at the disagreement vertex");
        chosen = best_i;
      }
      node.e = cand[static_cast<std::size_t>(chosen)];
      node.p = occ[static_cast<std::size_t>(chosen)] / z;
      node.q = std::min(occ_shift[static_cast<std::size_t>(chosen)] / zshift, node.p);
    }
    int idx = static_cast<int>(nodes_.size());
    nodes_.push_back(std::move(node));
    index_.emplace(std::move(key), idx);
    return idx;
  }

  int child(int idx, int branch) {
    if (nodes_[static_cast<std::size_t>(idx)].children[branch] >= 0)
      return nodes_[static_cast<std::size_t>(idx)].children[branch];
    NodeState st = nodes_[static_cast<std::size_t>(idx)].state;  // copy
    EdgeId e = nodes_[static_cast<std::size_t>(idx)].e;
    Edge ed = inst_.graph().edge(e);
    st.removed |= (1u << e);
    if (branch == 1) {
      // both occupied: shift both endpoint signatures
      ++st.shifts[static_cast<std::size_t>(ed.u)];
      ++st.shifts[static_cast<std::size_t>(ed.v)];
    } else if (branch == 2) {
      // split: shift the old disagreement vertex, move to the other endpoint
      VertexId other = ed.u == st.v ? ed.v : ed.u;
      ++st.shifts[static_cast<std::size_t>(st.v)];
      st.v = other;
    }
    int c = expand(st);
    nodes_[static_cast<std::size_t>(idx)].children[branch] = c;
    return c;
  }

  // Probability that the subtree's first component (in the global output
  // wiring given by `swap`) completes the configuration t on its remaining
  // edges.
  double pfirst(int idx, std::uint32_t tmask, bool swap) {
    Node& node = nodes_[static_cast<std::size_t>(idx)];
    std::uint32_t remaining = full_mask_ & ~node.state.removed;
    std::uint64_t key = (static_cast<std::uint64_t>(tmask & remaining) << 1) | (swap ? 1 : 0);
    if (auto it = node.pfirst_memo.find(key); it != node.pfirst_memo.end()) return it->second;
    double val = 0.0;
    if (node.base) {
      double w, wshift;
      config_weights(node.state, tmask & node.free_mask, w, wshift);
      val = w / node.zbase;
    } else {
      bool te = (tmask >> node.e) & 1u;
      double p = node.p, q = node.q;
      if (!swap) {
        if (te) {
          if (q > 0.0) val += q * pfirst(child(idx, 1), tmask, swap);
          if (p - q > 0.0) val += (p - q) * pfirst(child(idx, 2), tmask, !swap);
        } else {
          if (1.0 - p > 0.0) val += (1.0 - p) * pfirst(child(idx, 0), tmask, swap);
        }
      } else {
        if (te) {
          if (q > 0.0) val += q * pfirst(child(idx, 1), tmask, swap);
        } else {
          if (1.0 - p > 0.0) val += (1.0 - p) * pfirst(child(idx, 0), tmask, swap);
          if (p - q > 0.0) val += (p - q) * pfirst(child(idx, 2), tmask, !swap);
        }
      }
    }
    nodes_[static_cast<std::size_t>(idx)].pfirst_memo.emplace(key, val);
    return val;
  }

  std::uint32_t base_pick(const Node& node, double target) const {
    // smallest rank whose cumulative weight exceeds the target
    std::size_t lo = 0, hi = node.cdf.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (node.cdf[mid] > target)
        hi = mid;
      else
        lo = mid + 1;
    }
    return oracle::detail::deposit_bits(static_cast<std::uint32_t>(lo), node.free_mask);
  }

  void scatter(std::uint32_t s, EdgeConfig& cfg) const {
    std::uint32_t rest = s;
    while (rest) {
      int e = __builtin_ctz(rest);
      rest &= rest - 1;
      cfg.set(e, true);
    }
  }

  const HolantInstance& inst_;
  VertexId v0_;
  std::uint32_t full_mask_ = 0;
  std::vector<std::uint32_t> vmasks_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, int> index_;
  int root_ = -1;
};

// One coupled pair (sigma, sigma').
inline CoupleTrace couple(const HolantInstance& inst, VertexId v, std::uint64_t seed) {
  CouplingTree tree(inst, v);
  Rng rng(seed);
  return tree.sample(rng);
}

struct W1Estimate {
  double mean = 0.0;
  double ci_half_width = 0.0;  // 99% normal-approximation half width
  long trials = 0;
};

inline constexpr double kZ99 = 2.5758293035489004;

// Monte Carlo mean Hamming distance over independent couplings; the paper's
// bound is mean <= P_max - 1.
inline W1Estimate estimate_w1(const HolantInstance& inst, VertexId v, long trials,
                              std::uint64_t seed) {
  CouplingTree tree(inst, v);
  Rng rng(seed);
  double sum = 0.0, sumsq = 0.0;
  for (long t = 0; t < trials; ++t) {
    CoupleTrace tr = tree.sample(rng);
    sum += tr.hamming;
    sumsq += static_cast<double>(tr.hamming) * tr.hamming;
  }
  W1Estimate est;
  est.trials = trials;
  est.mean = trials > 0 ? sum / static_cast<double>(trials) : 0.0;
  if (trials > 1) {
    double var = (sumsq - sum * sum / static_cast<double>(trials)) /
                 (static_cast<double>(trials) - 1.0);
    var = std::max(var, 0.0);
    est.ci_half_width = kZ99 * std::sqrt(var / static_cast<double>(trials));
  }
  return est;
}

// Composition of two single-vertex shifts through a shared intermediate
// sample: (sigma, sigma_mid) from Couple(G, f, u), then sigma'' drawn from
// Couple(G, D_u f, v) conditioned on its first component equalling
// sigma_mid. Realizes the 2(P_max - 1) bound for edge-pinning discrepancies.
inline CoupleTrace couple_two_shifts(const HolantInstance& inst, VertexId u, VertexId v,
                                     std::uint64_t seed) {
  if (!(inst.sig(u)(1) > 0.0))
    throw HolantError(Errc::precondition_violated, "couple_two_shifts requires f_u(1) > 0");
  HolantInstance shifted = inst.with_vertex_shifted(u);
  if (!(shifted.sig(v)(1) > 0.0))
    throw HolantError(Errc::precondition_violated,
                      "couple_two_shifts requires f_v(1) > 0 after the first shift");
  CouplingTree tree1(inst, u);
  CouplingTree tree2(shifted, v);
  Rng rng(seed);
  CoupleTrace leg1 = tree1.sample(rng);
  auto [second, glue_split] = tree2.sample_second_given_first(leg1.second, rng);
  CoupleTrace tr;
  tr.first = leg1.first;
  tr.second = second;
  tr.hamming = tr.first.hamming_distance(tr.second);
  tr.halted_by_case2 = leg1.halted_by_case2 && !glue_split;
  tr.recursion_depth = leg1.recursion_depth;
  return tr;
}

// (marginal lower bound, coupling upper bound) bracket for W1 between two
// instances on the same edge set that differ by at most one downward shift.
struct W1Bracket {
  double lower = 0.0;
  double upper_mean = 0.0;
  double upper_ci = 0.0;
  bool pass = true;  // lower <= upper_mean + 3 se + eps
};

inline W1Bracket w1_bracket(const HolantInstance& a, const HolantInstance& b, long trials,
                            std::uint64_t seed) {
  if (!(a.graph() == b.graph()))
    throw HolantError(Errc::invalid_argument, "w1_bracket requires identical graphs");
  for (EdgeId e = 0; e < a.edge_count(); ++e)
    if (a.lambda(e) != b.lambda(e))
      throw HolantError(Errc::invalid_argument, "w1_bracket requires identical edge weights");
  std::vector<VertexId> diff;
  for (VertexId v = 0; v < a.vertex_count(); ++v)
    if (!(a.sig(v) == b.sig(v))) diff.push_back(v);

  W1Bracket br;
  auto mu_a = oracle::edge_marginals(a);
  auto mu_b = oracle::edge_marginals(b);
  for (EdgeId e = 0; e < a.edge_count(); ++e)
    br.lower += std::fabs(mu_a[static_cast<std::size_t>(e)] - mu_b[static_cast<std::size_t>(e)]);

  if (diff.empty()) {
    br.upper_mean = 0.0;
    br.upper_ci = 0.0;
    br.pass = br.lower <= 1e-9;
    return br;
  }
  if (diff.size() != 1)
    throw HolantError(Errc::invalid_argument,
                      "w1_bracket requires instances differing at a single vertex");
  VertexId v = diff[0];
  W1Estimate est;
  if (b.sig(v) == a.sig(v).shifted_same_degree()) {
    est = estimate_w1(a, v, trials, seed);
  } else if (a.sig(v) == b.sig(v).shifted_same_degree()) {
    est = estimate_w1(b, v, trials, seed);
  } else {
    throw HolantError(Errc::invalid_argument,
                      "w1_bracket requires a single downward-shift difference");
  }
  br.upper_mean = est.mean;
  br.upper_ci = est.ci_half_width;
  double se = est.ci_half_width / kZ99;
  br.pass = br.lower <= br.upper_mean + 3.0 * se + 1e-9;
  return br;
}

}  // namespace holant::coupling
