#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "holant/error.hpp"
#include "holant/graph.hpp"
#include "holant/signature.hpp"

namespace holant {

// A binary symmetric Holant problem (G, f, lambda): per-vertex signatures of
// length degree(v)+1 and positive per-edge weights. The Gibbs weight of an
// edge subset S is prod_v f_v(|S cap E_v|) * prod_{e in S} lambda_e.
//
// Construction checks shapes, positivity of lambda, signature validity and
// that no signature is identically zero. It does NOT require f_v(0) > 0:
// instances with f_v(0) = 0 (e.g. the influence counterexamples) are legal
// Holant problems, they just fall outside the mixing theorem's hypotheses.
// Callers that rely on those hypotheses check positive_at_empty().
class HolantInstance {
public:
  static HolantInstance make(Graph g, std::vector<Signature> sigs,
                             std::vector<double> lambdas) {
    if (static_cast<int>(sigs.size()) != g.vertex_count())
      throw HolantError(Errc::invalid_argument, "one signature per vertex required");
    if (static_cast<int>(lambdas.size()) != g.edge_count())
      throw HolantError(Errc::invalid_argument, "one lambda per edge required");
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      if (sigs[static_cast<std::size_t>(v)].degree() != g.degree(v))
        throw HolantError(Errc::invalid_argument,
                          "signature length must equal degree+1 at vertex " + std::to_string(v));
      if (sigs[static_cast<std::size_t>(v)].all_zero())
        throw HolantError(Errc::invalid_argument,
                          "identically-zero signature at vertex " + std::to_string(v));
    }
    for (double lam : lambdas)
      if (!(lam > 0.0) || !std::isfinite(lam))
        throw HolantError(Errc::invalid_argument, "edge weights must be positive finite reals");
    HolantInstance inst;
    inst.graph_ = std::move(g);
    inst.sigs_ = std::move(sigs);
    inst.lambdas_ = std::move(lambdas);
    return inst;
  }

  const Graph& graph() const { return graph_; }
  int vertex_count() const { return graph_.vertex_count(); }
  int edge_count() const { return graph_.edge_count(); }
  const Signature& sig(VertexId v) const { return sigs_[static_cast<std::size_t>(v)]; }
  double lambda(EdgeId e) const { return lambdas_[static_cast<std::size_t>(e)]; }
  std::span<const double> lambdas() const { return lambdas_; }

  // All f_v(0) > 0; hypothesis of the mixing theorem and what makes the
  // empty configuration a valid start state.
  bool positive_at_empty() const {
    for (const auto& s : sigs_)
      if (!(s(0) > 0.0)) return false;
    return true;
  }

  std::vector<int> occupancy_counts(const EdgeConfig& cfg) const {
    std::vector<int> c(static_cast<std::size_t>(vertex_count()), 0);
    for (EdgeId e = 0; e < edge_count(); ++e) {
      if (!cfg.get(e)) continue;
      Edge ed = graph_.edge(e);
      ++c[static_cast<std::size_t>(ed.u)];
      ++c[static_cast<std::size_t>(ed.v)];
    }
    return c;
  }

  // Gibbs weight of a configuration. Accumulates linearly up to 30 edges and
  // in the log domain beyond, where long products could overflow.
  double weight(const EdgeConfig& cfg) const {
    if (cfg.size() != edge_count())
      throw HolantError(Errc::invalid_argument, "configuration length mismatch");
    return edge_count() > kLogDomainThreshold ? weight_log(cfg) : weight_linear(cfg);
  }

  double weight_linear(const EdgeConfig& cfg) const {
    auto counts = occupancy_counts(cfg);
    double w = 1.0;
    for (VertexId v = 0; v < vertex_count(); ++v) {
      w *= sig(v)(counts[static_cast<std::size_t>(v)]);
      if (w == 0.0) return 0.0;
    }
    for (EdgeId e = 0; e < edge_count(); ++e)
      if (cfg.get(e)) w *= lambda(e);
    return w;
  }

  double weight_log(const EdgeConfig& cfg) const {
    auto counts = occupancy_counts(cfg);
    double acc = 0.0;
    for (VertexId v = 0; v < vertex_count(); ++v) {
      double f = sig(v)(counts[static_cast<std::size_t>(v)]);
      if (f == 0.0) return 0.0;
      acc += std::log(f);
    }
    for (EdgeId e = 0; e < edge_count(); ++e)
      if (cfg.get(e)) acc += std::log(lambda(e));
    return std::exp(acc);
  }

  // Weight from a bitmask configuration; hot path for the exact oracle
  // (edge_count() <= 32 required).
  double weight_mask(std::uint32_t cfg, std::span<const std::uint32_t> vertex_masks) const {
    double w = 1.0;
    for (VertexId v = 0; v < vertex_count(); ++v) {
      int c = __builtin_popcount(cfg & vertex_masks[static_cast<std::size_t>(v)]);
      w *= sig(v)(c);
      if (w == 0.0) return 0.0;
    }
    std::uint32_t rest = cfg;
    while (rest) {
      int e = __builtin_ctz(rest);
      rest &= rest - 1;
      w *= lambda(e);
    }
    return w;
  }

  // Induced instance of a pinning: (G \ Lambda, D_tau f, lambda restricted).
  // Each vertex keeps f'_v(k) = f_v(k + #occupied pinned edges at v) for the
  // new degree. Throws InfeasiblePinning when some shifted signature is
  // identically zero (eager check; full zero-probability detection is the
  // oracle's job). Returns the old-id -> new-id edge map alongside.
  std::pair<HolantInstance, std::vector<EdgeId>> induced(const Pinning& pin) const {
    std::vector<int> occupied_at(static_cast<std::size_t>(vertex_count()), 0);
    for (std::size_t i = 0; i < pin.domain.size(); ++i) {
      EdgeId e = pin.domain[i];
      if (e < 0 || e >= edge_count())
        throw HolantError(Errc::invalid_argument, "pinned edge id out of range");
      if (pin.values[i]) {
        Edge ed = graph_.edge(e);
        ++occupied_at[static_cast<std::size_t>(ed.u)];
        ++occupied_at[static_cast<std::size_t>(ed.v)];
      }
    }
    auto [g2, remap] = graph_.remove_edges(pin.domain);
    std::vector<Signature> sigs2;
    sigs2.reserve(static_cast<std::size_t>(vertex_count()));
    for (VertexId v = 0; v < vertex_count(); ++v) {
      int m_v = occupied_at[static_cast<std::size_t>(v)];
      int d2 = g2.degree(v);
      std::vector<double> vals(static_cast<std::size_t>(d2) + 1);
      for (int k = 0; k <= d2; ++k) vals[static_cast<std::size_t>(k)] = sig(v)(m_v + k);
      Signature s2 = Signature::checked(std::move(vals));
      if (s2.all_zero())
        throw HolantError(Errc::infeasible_pinning,
                          "pinning shifts signature at vertex " + std::to_string(v) +
                              " to all-zero");
      sigs2.push_back(std::move(s2));
    }
    std::vector<double> lam2;
    for (EdgeId e = 0; e < edge_count(); ++e)
      if (remap[static_cast<std::size_t>(e)] >= 0)
        lam2.push_back(lambda(e));
    return {make(std::move(g2), std::move(sigs2), std::move(lam2)), std::move(remap)};
  }

  // (G, D_v f, lambda): the single-vertex downward shift with the graph (and
  // hence v's degree) unchanged. Throws if the shifted signature vanishes,
  // i.e. f_v(k) = 0 for all k >= 1.
  HolantInstance with_vertex_shifted(VertexId v) const {
    Signature s2 = sig(v).shifted_same_degree();
    if (s2.all_zero())
      throw HolantError(Errc::precondition_violated,
                        "downward shift at vertex " + std::to_string(v) +
                            " gives an identically-zero signature");
    std::vector<Signature> sigs2 = sigs_;
    sigs2[static_cast<std::size_t>(v)] = std::move(s2);
    return make(graph_, std::move(sigs2), lambdas_);
  }

  static constexpr int kLogDomainThreshold = 30;

private:
  HolantInstance() = default;
  Graph graph_;
  std::vector<Signature> sigs_;
  std::vector<double> lambdas_;
};

// ---------------------------------------------------------------------------
// Model builders

inline HolantInstance build_b_matching(const Graph& g, std::span<const int> b,
                                       std::span<const double> lambda) {
  if (static_cast<int>(b.size()) != g.vertex_count())
    throw HolantError(Errc::invalid_argument, "need one threshold per vertex");
  if (static_cast<int>(lambda.size()) != g.edge_count())
    throw HolantError(Errc::invalid_argument, "need one lambda per edge");
  std::vector<Signature> sigs;
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    sigs.push_back(b_matching_signature(g.degree(v), b[static_cast<std::size_t>(v)]));
  return HolantInstance::make(g, std::move(sigs),
                              std::vector<double>(lambda.begin(), lambda.end()));
}

inline HolantInstance build_b_matching(const Graph& g, int b, double lambda) {
  std::vector<int> bs(static_cast<std::size_t>(g.vertex_count()), b);
  std::vector<double> lams(static_cast<std::size_t>(g.edge_count()), lambda);
  return build_b_matching(g, bs, lams);
}

// b-edge covers are handled through complementation: the returned instance
// has thresholds b_v = d_v - b and edge weights 1/lambda, and samples from it
// must be complemented (S -> E \ S) to give b-edge covers with weight
// proportional to lambda^|S|. The direct signature [0,..,0,1,..,1] would
// violate f_v(0) > 0, while the complement stays inside the theorem's class.
struct BEdgeCoverModel {
  HolantInstance complement_instance;
  int b = 0;
  double lambda = 1.0;
  bool complemented = true;  // outputs require S -> E \ S
};

inline BEdgeCoverModel build_b_edge_cover(const Graph& g, int b, double lambda) {
  if (b < 0) throw HolantError(Errc::invalid_argument, "negative cover threshold");
  if (!(lambda > 0.0))
    throw HolantError(Errc::invalid_argument, "lambda must be positive");
  int min_deg = g.vertex_count() == 0 ? 0 : g.degree(0);
  for (VertexId v = 0; v < g.vertex_count(); ++v) min_deg = std::min(min_deg, g.degree(v));
  if (b > min_deg)
    throw HolantError(Errc::invalid_argument,
                      "no b-edge cover exists: b exceeds the minimum degree");
  std::vector<int> thresholds(static_cast<std::size_t>(g.vertex_count()));
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    thresholds[static_cast<std::size_t>(v)] = g.degree(v) - b;
  std::vector<double> lams(static_cast<std::size_t>(g.edge_count()), 1.0 / lambda);
  BEdgeCoverModel model{build_b_matching(g, thresholds, lams), b, lambda, true};
  return model;
}

inline EdgeConfig complement_config(const EdgeConfig& cfg) {
  EdgeConfig out(cfg.size());
  for (EdgeId e = 0; e < cfg.size(); ++e) out.set(e, !cfg.get(e));
  return out;
}

}  // namespace holant
