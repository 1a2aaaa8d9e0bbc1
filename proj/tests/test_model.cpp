#include <catch2/catch.hpp>

#include <cmath>

#include "brute.hpp"
#include "holant/instance.hpp"
#include "holant/oracle.hpp"
#include "holant/params.hpp"

using namespace holant;

namespace {

Graph k3() { return Graph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}}); }

HolantInstance single_edge(double lambda) {
  Graph g = Graph::from_edges(2, {{0, 1}});
  std::vector<Signature> sigs = {Signature::checked({1, 1}), Signature::checked({1, 1})};
  return HolantInstance::make(g, sigs, {lambda});
}

}  // namespace

TEST_CASE("instance construction validates shapes", "[model]") {
  Graph g = k3();
  std::vector<Signature> sigs(3, Signature::checked({1, 1, 0}));
  REQUIRE_NOTHROW(HolantInstance::make(g, sigs, {1, 1, 1}));
  REQUIRE_THROWS_AS(HolantInstance::make(g, sigs, {1, 1}), HolantError);
  REQUIRE_THROWS_AS(HolantInstance::make(g, sigs, {1, 0, 1}), HolantError);
  std::vector<Signature> bad = {Signature::checked({1, 1}), Signature::checked({1, 1, 0}),
                                Signature::checked({1, 1, 0})};
  REQUIRE_THROWS_AS(HolantInstance::make(g, bad, {1, 1, 1}), HolantError);
  std::vector<Signature> zero = {Signature::checked({0, 0, 0}), Signature::checked({1, 1, 0}),
                                 Signature::checked({1, 1, 0})};
  REQUIRE_THROWS_AS(HolantInstance::make(g, zero, {1, 1, 1}), HolantError);
}

TEST_CASE("weight matches the defining product", "[model]") {
  HolantInstance inst = build_b_matching(k3(), 1, 1.0);
  REQUIRE(inst.weight(EdgeConfig::from_mask(3, 0b001)) == 1.0);  // single edge
  REQUIRE(inst.weight(EdgeConfig::from_mask(3, 0b011)) == 0.0);  // vertex 1 doubly covered
  REQUIRE(single_edge(3.0).weight(EdgeConfig::from_mask(1, 1)) == 3.0);
  REQUIRE(inst.weight(EdgeConfig(3)) == 1.0);  // empty config has weight prod f_v(0)
}

TEST_CASE("linear and log weight paths agree", "[model]") {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    Graph g = gen_graph({GenSpec::Kind::random, 10, 4, -1}, rng.next());
    if (g.edge_count() == 0) continue;
    std::vector<double> lams;
    for (EdgeId e = 0; e < g.edge_count(); ++e) lams.push_back(0.25 + 2.0 * rng.next_double());
    HolantInstance inst = build_b_matching(
        g, std::vector<int>(static_cast<std::size_t>(g.vertex_count()), 2), lams);
    for (int k = 0; k < 50; ++k) {
      EdgeConfig cfg(g.edge_count());
      for (EdgeId e = 0; e < g.edge_count(); ++e) cfg.set(e, rng.next_double() < 0.3);
      double lin = inst.weight_linear(cfg);
      double lg = inst.weight_log(cfg);
      if (lin == 0.0)
        REQUIRE(lg == 0.0);
      else
        REQUIRE(lg == Approx(lin).epsilon(1e-9));
    }
  }
}

TEST_CASE("weight dispatches to the log domain above 30 edges", "[model]") {
  Graph g = gen_graph({GenSpec::Kind::path, 36, 0, -1}, 0);  // 35 edges
  HolantInstance inst = build_b_matching(g, 1, 1.5);
  EdgeConfig cfg(35);
  for (EdgeId e = 0; e < 35; e += 3) cfg.set(e, true);  // a valid matching
  double w = inst.weight(cfg);
  REQUIRE(w == inst.weight_log(cfg));  // dispatch picks the log path
  REQUIRE(w == Approx(inst.weight_linear(cfg)).epsilon(1e-9));
  REQUIRE(w == Approx(std::pow(1.5, 12)).epsilon(1e-9));
}

TEST_CASE("induced instance of a pinning", "[model]") {
  HolantInstance inst = build_b_matching(k3(), 1, 1.0);

  SECTION("occupied pin shifts endpoint signatures") {
    auto [sub, remap] = inst.induced(Pinning::single(0, true));
    REQUIRE(sub.edge_count() == 2);
    REQUIRE(remap == std::vector<EdgeId>{-1, 0, 1});
    // endpoints of edge 0 (vertices 0 and 1) get [1,0]; vertex 2 keeps [1,1,0]
    REQUIRE(sub.sig(0) == Signature::checked({1, 0}));
    REQUIRE(sub.sig(1) == Signature::checked({1, 0}));
    REQUIRE(sub.sig(2) == Signature::checked({1, 1, 0}));
    // only the empty configuration is feasible
    REQUIRE(brute::partition(sub) == 1.0);
  }

  SECTION("empty pinning is the identity") {
    auto [sub, remap] = inst.induced(Pinning::empty());
    REQUIRE(sub.edge_count() == 3);
    REQUIRE(brute::partition(sub) == brute::partition(inst));
  }

  SECTION("unoccupied pin truncates to the new degree") {
    auto [sub, remap] = inst.induced(Pinning::single(0, false));
    REQUIRE(sub.sig(0) == Signature::checked({1, 1}));
    REQUIRE(sub.sig(2) == Signature::checked({1, 1, 0}));
  }

  SECTION("infeasible pinning rejected eagerly") {
    // pin both edges at vertex 1 occupied: signature shifts to all-zero
    Pinning pin = Pinning::single(0, true).with(1, true);
    REQUIRE_THROWS_AS(inst.induced(pin), HolantError);
  }
}

TEST_CASE("conditional consistency: induced distribution equals conditional", "[model]") {
  // exhaustive over small instances and single-edge pinnings
  Rng rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    Graph g = gen_graph({GenSpec::Kind::random, 6, 3, -1}, rng.next());
    if (g.edge_count() < 2 || g.edge_count() > 10) continue;
    int b = 1 + static_cast<int>(rng.next_below(2));
    double lam = 0.5 + rng.next_double();
    HolantInstance inst = build_b_matching(g, b, lam);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      for (int val = 0; val <= 1; ++val) {
        std::uint32_t dom = 1u << e, ve = val ? dom : 0u;
        double mass = brute::restricted(inst, dom, ve);
        if (!(mass > 0.0)) continue;
        HolantInstance sub = inst.induced(Pinning::single(e, val == 1)).first;
        // conditional of inst on the pinning vs Gibbs of induced, edge by edge
        auto sub_dist = brute::distribution(sub);
        double tv = 0.0;
        for (std::uint32_t sc = 0; sc < sub_dist.size(); ++sc) {
          // embed the sub-config into the original edge index space
          std::uint32_t full = ve;
          int pos = 0;
          for (EdgeId oe = 0; oe < g.edge_count(); ++oe) {
            if (oe == e) continue;
            if (sc & (1u << pos)) full |= (1u << oe);
            ++pos;
          }
          double cond = brute::config_weight(inst, full) / mass;
          tv += std::fabs(cond - sub_dist[sc]);
        }
        REQUIRE(tv / 2.0 < 1e-12);
      }
    }
  }
}

TEST_CASE("conditional consistency under multi-edge pinnings", "[model]") {
  Rng rng(808);
  int checked = 0;
  while (checked < 30) {
    Graph g = gen_graph({GenSpec::Kind::random, 5, 3, -1}, rng.next());
    if (g.edge_count() < 3) continue;
    HolantInstance inst = build_b_matching(g, 1 + static_cast<int>(rng.next_below(2)),
                                           0.5 + rng.next_double());
    // random pinning on two distinct edges
    EdgeId e1 = static_cast<EdgeId>(rng.next_below(g.edge_count()));
    EdgeId e2 = (e1 + 1 + static_cast<EdgeId>(rng.next_below(g.edge_count() - 1))) %
                g.edge_count();
    bool v1 = rng.next_double() < 0.5, v2 = rng.next_double() < 0.5;
    std::uint32_t dom = (1u << e1) | (1u << e2);
    std::uint32_t val = (v1 ? (1u << e1) : 0u) | (v2 ? (1u << e2) : 0u);
    double mass = brute::restricted(inst, dom, val);
    if (!(mass > 0.0)) continue;
    Pinning pin = Pinning::single(e1, v1).with(e2, v2);
    auto [sub, remap] = inst.induced(pin);
    auto sub_dist = brute::distribution(sub);
    double tv = 0.0;
    for (std::uint32_t sc = 0; sc < sub_dist.size(); ++sc) {
      std::uint32_t full = val;
      for (EdgeId oe = 0; oe < g.edge_count(); ++oe) {
        EdgeId ne = remap[static_cast<std::size_t>(oe)];
        if (ne >= 0 && (sc & (1u << ne))) full |= (1u << oe);
      }
      tv += std::fabs(brute::config_weight(inst, full) / mass - sub_dist[sc]);
    }
    REQUIRE(tv / 2.0 < 1e-12);
    ++checked;
  }
}

TEST_CASE("with_vertex_shifted keeps the degree and pads with zero", "[model]") {
  HolantInstance inst = build_b_matching(k3(), 1, 1.0);
  HolantInstance shifted = inst.with_vertex_shifted(1);
  REQUIRE(shifted.sig(1) == Signature::checked({1, 0, 0}));
  REQUIRE(shifted.sig(0) == Signature::checked({1, 1, 0}));
  // shifting a vertex whose signature has no positive index support fails
  REQUIRE_THROWS_AS(shifted.with_vertex_shifted(1), HolantError);
}

TEST_CASE("b-matching golden partition functions", "[model]") {
  REQUIRE(brute::partition(build_b_matching(k3(), 1, 1.0)) == 4.0);
  Graph path4 = gen_graph({GenSpec::Kind::path, 4, 0, -1}, 0);
  REQUIRE(brute::partition(build_b_matching(path4, 1, 1.0)) == 5.0);
  REQUIRE(brute::partition(build_b_matching(k3(), 2, 1.0)) == 8.0);
}

TEST_CASE("per-vertex thresholds are clamped", "[model]") {
  HolantInstance inst = build_b_matching(k3(), 7, 1.0);
  REQUIRE(inst.sig(0) == Signature::checked({1, 1, 1}));
}

TEST_CASE("b-edge covers via complementation", "[model]") {
  SECTION("K3 edge covers count 4") {
    BEdgeCoverModel cover = build_b_edge_cover(k3(), 1, 1.0);
    // complement instance is the 1-matching instance; covers = complements
    double count = 0;
    for (std::uint32_t mask = 0; mask < 8; ++mask)
      count += brute::config_weight(cover.complement_instance, mask);
    REQUIRE(count == 4.0);
    // direct enumeration of covers for cross-check
    int direct = 0;
    Graph g = k3();
    for (std::uint32_t mask = 0; mask < 8; ++mask) {
      std::vector<int> cnt(3, 0);
      for (EdgeId e = 0; e < 3; ++e)
        if (mask & (1u << e)) {
          ++cnt[static_cast<std::size_t>(g.edge(e).u)];
          ++cnt[static_cast<std::size_t>(g.edge(e).v)];
        }
      if (cnt[0] >= 1 && cnt[1] >= 1 && cnt[2] >= 1) ++direct;
    }
    REQUIRE(direct == 4);
  }

  SECTION("path with 2 edges has a single 1-edge cover") {
    Graph path = gen_graph({GenSpec::Kind::path, 3, 0, -1}, 0);
    BEdgeCoverModel cover = build_b_edge_cover(path, 1, 1.0);
    REQUIRE(brute::partition(cover.complement_instance) == 1.0);
  }

  SECTION("b = 0 is unconstrained") {
    BEdgeCoverModel cover = build_b_edge_cover(k3(), 0, 1.0);
    REQUIRE(brute::partition(cover.complement_instance) == 8.0);
  }

  SECTION("b above the min degree is rejected") {
    REQUIRE_THROWS_AS(build_b_edge_cover(k3(), 3, 1.0), HolantError);
  }
}

TEST_CASE("complement correctness with weights", "[model]") {
  // relative weights of complements match lambda^{|S|} on the cover side
  Rng rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = gen_graph({GenSpec::Kind::random, 5, 4, -1}, rng.next());
    if (g.vertex_count() == 0 || g.edge_count() == 0) continue;
    int min_deg = g.degree(0);
    for (VertexId v = 0; v < g.vertex_count(); ++v) min_deg = std::min(min_deg, g.degree(v));
    for (int b = 1; b <= std::min(2, min_deg); ++b) {
      double lam = 0.5 + 1.5 * rng.next_double();
      BEdgeCoverModel cover = build_b_edge_cover(g, b, lam);
      int m = g.edge_count();
      for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        std::uint32_t compl_mask = ~mask & ((1u << m) - 1);
        // is mask a b-edge cover?
        std::vector<int> cnt(static_cast<std::size_t>(g.vertex_count()), 0);
        for (EdgeId e = 0; e < m; ++e)
          if (mask & (1u << e)) {
            ++cnt[static_cast<std::size_t>(g.edge(e).u)];
            ++cnt[static_cast<std::size_t>(g.edge(e).v)];
          }
        bool is_cover = true;
        for (VertexId v = 0; v < g.vertex_count(); ++v)
          if (cnt[static_cast<std::size_t>(v)] < b) is_cover = false;
        double w_complement = brute::config_weight(cover.complement_instance, compl_mask);
        if (!is_cover) {
          REQUIRE(w_complement == 0.0);
        } else {
          // lambda^{|S|} = lambda^m (1/lambda)^{|E \ S|}, and the complement
          // instance carries exactly (1/lambda)^{|S'|}
          REQUIRE(w_complement * std::pow(lam, m) ==
                  Approx(std::pow(lam, __builtin_popcount(mask))).epsilon(1e-9));
        }
      }
    }
  }
}

TEST_CASE("instance params", "[model]") {
  SECTION("K3 golden") {
    InstanceParams p = compute_params(build_b_matching(k3(), 1, 1.0));
    REQUIRE(p.r_max == 1.0);
    REQUIRE(p.r_min == 1.0);
    REQUIRE(p.lambda_max == 1.0);
    REQUIRE(p.lambda_min == 1.0);
    REQUIRE(p.p_max == Approx(3.0).epsilon(1e-14));
    REQUIRE(p.delta == 2);
  }
  SECTION("single edge with lambda 2") {
    InstanceParams p = compute_params(single_edge(2.0));
    REQUIRE(p.r_max == 1.0);
    REQUIRE(p.p_max == Approx(3.0).epsilon(1e-14));
  }
  SECTION("b = 0 collapses") {
    InstanceParams p = compute_params(build_b_matching(k3(), 0, 1.0));
    REQUIRE(p.r_max == 0.0);
    REQUIRE(p.p_max == 1.0);
    REQUIRE(std::isinf(p.r_min));
  }
  SECTION("p_max upper bound") {
    InstanceParams p = compute_params(build_b_matching(k3(), 1, 1.0));
    REQUIRE(p_max_upper_bound(p) == Approx(4.0).epsilon(1e-14));
    REQUIRE(p_max_upper_bound(p) >= p.p_max);
    InstanceParams zero = compute_params(build_b_matching(k3(), 0, 1.0));
    REQUIRE(p_max_upper_bound(zero) == 1.0);
    // Delta=3, b=1 uniform: p_max = 1 + 3 = 4 <= 2^3
    Graph star = gen_graph({GenSpec::Kind::star, 4, 0, -1}, 0);
    InstanceParams sp = compute_params(build_b_matching(star, 1, 1.0));
    REQUIRE(sp.p_max == Approx(4.0).epsilon(1e-14));
    REQUIRE(p_max_upper_bound(sp) == Approx(8.0).epsilon(1e-14));
  }
}

TEST_CASE("params are monotone under pinnings", "[model]") {
  Rng rng(404);
  for (int trial = 0; trial < 40; ++trial) {
    Graph g = gen_graph({GenSpec::Kind::random, 6, 3, -1}, rng.next());
    if (g.edge_count() < 2) continue;
    HolantInstance inst = build_b_matching(g, 1 + static_cast<int>(rng.next_below(2)),
                                           0.5 + 1.5 * rng.next_double());
    InstanceParams p = compute_params(inst);
    EdgeId e = static_cast<EdgeId>(rng.next_below(g.edge_count()));
    for (int val = 0; val <= 1; ++val) {
      if (brute::restricted(inst, 1u << e, val ? (1u << e) : 0u) <= 0.0) continue;
      HolantInstance sub = inst.induced(Pinning::single(e, val == 1)).first;
      InstanceParams q = compute_params(sub);
      REQUIRE(q.r_max <= p.r_max + 1e-12);
      REQUIRE(q.lambda_max <= p.lambda_max + 1e-12);
      REQUIRE(q.p_max <= p.p_max + 1e-9);
      REQUIRE(q.delta <= p.delta);
      REQUIRE(q.r_min >= p.r_min - 1e-12);
      REQUIRE(q.lambda_min >= p.lambda_min - 1e-12);
    }
  }
}
