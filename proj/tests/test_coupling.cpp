#include <catch2/catch.hpp>

#include <cmath>

#include "brute.hpp"
#include "holant/analysis.hpp"
#include "holant/coupling.hpp"
#include "holant/stats.hpp"

using namespace holant;

namespace {

Graph k3() { return Graph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}}); }

HolantInstance single_edge() {
  Graph g = Graph::from_edges(2, {{0, 1}});
  std::vector<Signature> sigs = {Signature::checked({1, 1}), Signature::checked({1, 1})};
  return HolantInstance::make(g, sigs, {1.0});
}

std::vector<long> tally(const std::vector<EdgeConfig>& cfgs, int m) {
  std::vector<long> counts(1ull << m, 0);
  for (const auto& c : cfgs) ++counts[c.low_mask()];
  return counts;
}

}  // namespace

TEST_CASE("isolated disagreement vertex gives the identity coupling", "[coupling]") {
  Graph g = Graph::from_edges(3, {{0, 1}});
  std::vector<Signature> sigs = {Signature::checked({1, 1}), Signature::checked({1, 1}),
                                 Signature::checked({2})};
  HolantInstance inst = HolantInstance::make(g, sigs, {1.0});
  coupling::CoupleTrace tr = coupling::couple(inst, 2, 5);
  REQUIRE(tr.hamming == 0);
  REQUIRE(tr.first == tr.second);
  REQUIRE(tr.recursion_depth == 0);
  auto est = coupling::estimate_w1(inst, 2, 500, 5);
  REQUIRE(est.mean == 0.0);
  REQUIRE(est.ci_half_width == 0.0);
}

TEST_CASE("single edge coupling has mean Hamming 1/2", "[coupling]") {
  HolantInstance inst = single_edge();
  // mu_e(1) = 1/2, mu'_e(1) = 0: pairs (0,0) and (1,0) each with prob 1/2
  auto est = coupling::estimate_w1(inst, 0, 20000, 11);
  REQUIRE(est.mean == Approx(0.5).margin(0.02));
  InstanceParams p = compute_params(inst);
  REQUIRE(est.mean - 3.0 * est.ci_half_width / coupling::kZ99 <= p.p_max - 1.0);

  // exact node probabilities: every trial decides the edge as (U<1/2, U<0)
  coupling::CouplingTree tree(inst, 0);
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    auto tr = tree.sample(rng);
    bool f = tr.first.get(0), s = tr.second.get(0);
    REQUIRE_FALSE(s);  // second side can never occupy
    REQUIRE((f || tr.hamming == 0));
  }
  REQUIRE(tree.nodes_monotone());
}

TEST_CASE("preconditions", "[coupling]") {
  // f_v(1) = 0 at a non-isolated vertex
  Graph g = Graph::from_edges(2, {{0, 1}});
  std::vector<Signature> sigs = {Signature::checked({1, 0}), Signature::checked({1, 1})};
  HolantInstance inst = HolantInstance::make(g, sigs, {1.0});
  REQUIRE_THROWS_AS(coupling::couple(inst, 0, 1), HolantError);
  // cap
  Graph big = gen_graph({GenSpec::Kind::path, 23, 0, -1}, 0);
  REQUIRE_THROWS_AS(coupling::couple(build_b_matching(big, 1, 1.0), 0, 1), HolantError);
}

TEST_CASE("both output marginals match their oracle distributions", "[coupling]") {
  HolantInstance inst = build_b_matching(k3(), 1, 1.0);
  HolantInstance shifted = inst.with_vertex_shifted(0);
  coupling::CouplingTree tree(inst, 0);
  Rng rng(271828);
  const int trials = 100000;
  std::vector<EdgeConfig> firsts, seconds;
  firsts.reserve(trials);
  seconds.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    auto tr = tree.sample(rng);
    firsts.push_back(tr.first);
    seconds.push_back(tr.second);
  }
  auto gof1 = stats::chi_square_gof(tally(firsts, 3), brute::distribution(inst));
  auto gof2 = stats::chi_square_gof(tally(seconds, 3), brute::distribution(shifted));
  REQUIRE(gof1.p_value > 1e-3);
  REQUIRE(gof2.p_value > 1e-3);
  REQUIRE(tree.nodes_monotone());
}

TEST_CASE("K3 W1 estimate sits well below p_max - 1", "[coupling]") {
  HolantInstance inst = build_b_matching(k3(), 1, 1.0);
  InstanceParams p = compute_params(inst);
  for (VertexId v = 0; v < 3; ++v) {
    auto est = coupling::estimate_w1(inst, v, 20000, 313 + v);
    REQUIRE(est.mean + 3.0 * est.ci_half_width <= p.p_max - 1.0);  // = 2
  }
}

TEST_CASE("case-2 frequency dominates the all-zero probability", "[coupling]") {
  HolantInstance inst = build_b_matching(k3(), 1, 1.0);
  // mu(E_v all unoccupied) = 2/4 = 1/2 for every K3 vertex
  coupling::CouplingTree tree(inst, 0);
  Rng rng(5150);
  const int trials = 50000;
  int halted = 0;
  for (int t = 0; t < trials; ++t)
    if (tree.sample(rng).halted_by_case2) ++halted;
  double frac = static_cast<double>(halted) / trials;
  double sigma = std::sqrt(0.25 / trials);
  REQUIRE(frac >= 0.5 - 3.0 * sigma);
}

TEST_CASE("recursion depth bounded by edge count", "[coupling]") {
  HolantInstance inst = build_b_matching(k3(), 2, 0.7);
  coupling::CouplingTree tree(inst, 1);
  Rng rng(9);
  for (int t = 0; t < 2000; ++t) {
    auto tr = tree.sample(rng);
    REQUIRE(tr.recursion_depth <= inst.edge_count());
    REQUIRE(tr.hamming == tr.first.hamming_distance(tr.second));
  }
}

TEST_CASE("W1 sandwich on the <=4-vertex sweep", "[coupling]") {
  const long trials = 10000;
  std::uint64_t seed = 1902;
  long case_idx = 0;
  for (const Graph& g : analysis::connected_graphs_up_to(4)) {
    auto orbits = analysis::vertex_orbits(g);
    for (int b : {1, 2}) {
      for (double lam : {0.5, 1.0, 2.0}) {
        HolantInstance inst = build_b_matching(g, b, lam);
        InstanceParams params = compute_params(inst);
        auto mu = oracle::edge_marginals(inst);
        for (VertexId v = 0; v < g.vertex_count(); ++v) {
          if (orbits[static_cast<std::size_t>(v)] != v) continue;  // orbit representative only
          if (!(inst.sig(v)(1) > 0.0)) continue;
          auto est = coupling::estimate_w1(inst, v, trials, split_seed(seed, case_idx++));
          double se = est.ci_half_width / coupling::kZ99;
          REQUIRE(est.mean - 3.0 * se <= params.p_max - 1.0 + 1e-9);
          // oracle lower bound <= sampled mean + 3 se
          HolantInstance shifted = inst.with_vertex_shifted(v);
          auto mu2 = oracle::edge_marginals(shifted);
          double lower = 0.0;
          for (EdgeId e = 0; e < g.edge_count(); ++e)
            lower += std::fabs(mu[static_cast<std::size_t>(e)] - mu2[static_cast<std::size_t>(e)]);
          REQUIRE(lower <= est.mean + 3.0 * se + 1e-9);
        }
      }
    }
  }
}

TEST_CASE("distributional correctness on the <=4-vertex sweep", "[coupling]") {
  const int trials = 10000;
  std::uint64_t seed = 555;
  long case_idx = 0;
  for (const Graph& g : analysis::connected_graphs_up_to(4)) {
    auto orbits = analysis::vertex_orbits(g);
    for (int b : {1, 2}) {
      for (double lam : {0.5, 1.0, 2.0}) {
        HolantInstance inst = build_b_matching(g, b, lam);
        for (VertexId v = 0; v < g.vertex_count(); ++v) {
          if (orbits[static_cast<std::size_t>(v)] != v) continue;
          if (!(inst.sig(v)(1) > 0.0)) continue;
          coupling::CouplingTree tree(inst, v);
          Rng rng(split_seed(seed, case_idx++));
          std::vector<EdgeConfig> firsts, seconds;
          for (int t = 0; t < trials; ++t) {
            auto tr = tree.sample(rng);
            firsts.push_back(tr.first);
            seconds.push_back(tr.second);
          }
          HolantInstance shifted = inst.with_vertex_shifted(v);
          auto gof1 =
              stats::chi_square_gof(tally(firsts, g.edge_count()), brute::distribution(inst));
          auto gof2 =
              stats::chi_square_gof(tally(seconds, g.edge_count()), brute::distribution(shifted));
          REQUIRE(gof1.p_value > 1e-3);
          REQUIRE(gof2.p_value > 1e-3);
        }
      }
    }
  }
}

TEST_CASE("coupling at the 20-edge cap", "[coupling]") {
  Graph g = gen_graph({GenSpec::Kind::path, 21, 0, -1}, 0);  // 20 edges
  HolantInstance inst = build_b_matching(g, 1, 1.0);
  coupling::CouplingTree tree(inst, 10);
  Rng rng(2);
  InstanceParams p = compute_params(inst);
  double sum = 0.0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    auto tr = tree.sample(rng);
    REQUIRE(tr.recursion_depth <= 20);
    sum += tr.hamming;
  }
  REQUIRE(sum / trials <= p.p_max - 1.0 + 0.5);
  REQUIRE(tree.nodes_monotone());
}

TEST_CASE("base case samples disconnected remainders correctly", "[coupling]") {
  // couple at vertex 0: once E_0 is decided the disjoint edge {2,3} is still
  // free, so the base case must sample it from its own marginal
  Graph g = Graph::from_edges(4, {{0, 1}, {2, 3}});
  HolantInstance inst = build_b_matching(g, 1, 2.0);
  coupling::CouplingTree tree(inst, 0);
  Rng rng(17);
  const int trials = 50000;
  std::vector<EdgeConfig> firsts, seconds;
  for (int t = 0; t < trials; ++t) {
    auto tr = tree.sample(rng);
    firsts.push_back(tr.first);
    seconds.push_back(tr.second);
  }
  auto gof1 = stats::chi_square_gof(tally(firsts, 2), brute::distribution(inst));
  auto gof2 = stats::chi_square_gof(tally(seconds, 2),
                                    brute::distribution(inst.with_vertex_shifted(0)));
  REQUIRE(gof1.p_value > 1e-3);
  REQUIRE(gof2.p_value > 1e-3);
}

TEST_CASE("two-shift composition", "[coupling]") {
  SECTION("glued second component has the doubly-shifted law") {
    HolantInstance inst = build_b_matching(k3(), 2, 1.0);
    HolantInstance target = inst.with_vertex_shifted(0).with_vertex_shifted(1);
    const int trials = 100000;
    std::vector<EdgeConfig> seconds;
    for (int t = 0; t < trials; ++t)
      seconds.push_back(coupling::couple_two_shifts(inst, 0, 1, split_seed(33, t)).second);
    auto gof = stats::chi_square_gof(tally(seconds, 3), brute::distribution(target));
    REQUIRE(gof.p_value > 1e-3);
  }
  SECTION("mean bounded by 2(p_max - 1)") {
    HolantInstance inst = build_b_matching(k3(), 2, 1.0);
    InstanceParams p = compute_params(inst);
    const int trials = 20000;
    double sum = 0.0;
    for (int t = 0; t < trials; ++t)
      sum += coupling::couple_two_shifts(inst, 0, 1, split_seed(34, t)).hamming;
    REQUIRE(sum / trials <= 2.0 * (p.p_max - 1.0));
  }
  SECTION("single edge composition") {
    HolantInstance inst = single_edge();
    const int trials = 20000;
    double sum = 0.0;
    for (int t = 0; t < trials; ++t) {
      auto tr = coupling::couple_two_shifts(inst, 0, 1, split_seed(35, t));
      REQUIRE_FALSE(tr.second.get(0));  // doubly-shifted side never occupies
      sum += tr.hamming;
    }
    InstanceParams p = compute_params(inst);
    REQUIRE(sum / trials <= 2.0 * (p.p_max - 1.0));
    REQUIRE(sum / trials == Approx(0.5).margin(0.02));
  }
  SECTION("lower bracket below the composed mean") {
    HolantInstance inst = build_b_matching(k3(), 2, 1.0);
    HolantInstance target = inst.with_vertex_shifted(0).with_vertex_shifted(1);
    auto mu = oracle::edge_marginals(inst);
    auto mu2 = oracle::edge_marginals(target);
    double lower = 0.0;
    for (EdgeId e = 0; e < 3; ++e)
      lower += std::fabs(mu[static_cast<std::size_t>(e)] - mu2[static_cast<std::size_t>(e)]);
    const int trials = 20000;
    double sum = 0.0, sumsq = 0.0;
    for (int t = 0; t < trials; ++t) {
      int h = coupling::couple_two_shifts(inst, 0, 1, split_seed(36, t)).hamming;
      sum += h;
      sumsq += static_cast<double>(h) * h;
    }
    double mean = sum / trials;
    double sd = std::sqrt(std::max(0.0, sumsq / trials - mean * mean) / trials);
    REQUIRE(lower <= mean + 3.0 * sd + 1e-9);
  }
  SECTION("preconditions") {
    HolantInstance inst = build_b_matching(k3(), 1, 1.0);
    // after shifting u=0, vertex 0 has signature [1,0,0]: u=v=0 needs f(2)>0
    REQUIRE_THROWS_AS(coupling::couple_two_shifts(inst, 0, 0, 1), HolantError);
  }
}

TEST_CASE("w1 bracket", "[coupling]") {
  SECTION("identical instances") {
    HolantInstance inst = build_b_matching(k3(), 1, 1.0);
    auto br = coupling::w1_bracket(inst, inst, 100, 1);
    REQUIRE(br.lower == 0.0);
    REQUIRE(br.upper_mean == 0.0);
    REQUIRE(br.pass);
  }
  SECTION("single edge vs shifted endpoint") {
    HolantInstance a = single_edge();
    HolantInstance b = a.with_vertex_shifted(1);
    auto br = coupling::w1_bracket(a, b, 20000, 2);
    REQUIRE(br.lower == Approx(0.5).margin(1e-12));
    REQUIRE(br.upper_mean == Approx(0.5).margin(0.02));
    REQUIRE(br.pass);
  }
  SECTION("two-edge path vs shifted middle") {
    Graph g = Graph::from_edges(3, {{0, 1}, {1, 2}});
    HolantInstance a = build_b_matching(g, 1, 1.0);
    HolantInstance b = a.with_vertex_shifted(1);
    auto br = coupling::w1_bracket(a, b, 20000, 3);
    InstanceParams p = compute_params(a);
    double se = br.upper_ci / coupling::kZ99;
    REQUIRE(br.upper_mean - 3.0 * se <= p.p_max - 1.0);
    REQUIRE(br.pass);
    // arguments in either order
    auto br2 = coupling::w1_bracket(b, a, 20000, 3);
    REQUIRE(br2.pass);
  }
  SECTION("rejects unrelated instances") {
    HolantInstance a = build_b_matching(k3(), 1, 1.0);
    HolantInstance b = build_b_matching(k3(), 2, 1.0);  // differs at all vertices
    REQUIRE_THROWS_AS(coupling::w1_bracket(a, b, 10, 1), HolantError);
  }
}
