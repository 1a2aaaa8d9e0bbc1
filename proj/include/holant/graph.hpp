#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "holant/error.hpp"
#include "holant/rng.hpp"

namespace holant {

using VertexId = int;
using EdgeId = int;

struct Edge {
  VertexId u, v;  // normalized so that u < v
  bool operator==(const Edge&) const = default;
};

// Simple undirected graph with stable integer edge ids. Edge ids define the
// global total order used for tie-breaking everywhere (incidence lists,
// coupling edge choices, telescoping order). Immutable after construction.
class Graph {
public:
  Graph() = default;

  static Graph from_edges(int n, const std::vector<std::pair<int, int>>& pairs) {
    if (n < 0) throw HolantError(Errc::invalid_argument, "negative vertex count");
    Graph g;
    g.n_ = n;
    g.incidence_.assign(static_cast<std::size_t>(n), {});
    std::set<std::pair<int, int>> seen;
    for (const auto& [a, b] : pairs) {
      if (a < 0 || a >= n || b < 0 || b >= n)
        throw HolantError(Errc::invalid_argument, "edge endpoint out of range");
      if (a == b) throw HolantError(Errc::invalid_argument, "self-loop rejected");
      int u = std::min(a, b), v = std::max(a, b);
      if (!seen.insert({u, v}).second)
        throw HolantError(Errc::invalid_argument, "duplicate edge rejected");
      EdgeId id = static_cast<EdgeId>(g.edges_.size());
      g.edges_.push_back({u, v});
      g.incidence_[static_cast<std::size_t>(u)].push_back(id);
      g.incidence_[static_cast<std::size_t>(v)].push_back(id);
    }
    return g;
  }

  int vertex_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  Edge edge(EdgeId e) const {
    check_edge(e);
    return edges_[static_cast<std::size_t>(e)];
  }

  // E_v in ascending edge-id order.
  std::span<const EdgeId> incident_edges(VertexId v) const {
    if (v < 0 || v >= n_)
      throw HolantError(Errc::invalid_argument, "vertex id out of range");
    return incidence_[static_cast<std::size_t>(v)];
  }

  int degree(VertexId v) const { return static_cast<int>(incident_edges(v).size()); }

  int max_degree() const {
    int d = 0;
    for (const auto& inc : incidence_) d = std::max(d, static_cast<int>(inc.size()));
    return d;
  }

  // Other endpoint of e as seen from w.
  VertexId other_endpoint(EdgeId e, VertexId w) const {
    Edge ed = edge(e);
    return ed.u == w ? ed.v : ed.u;
  }

  // G minus the given edges, vertex set unchanged. Remaining edges are
  // renumbered densely in their original order; returns the old-id -> new-id
  // map with -1 for dropped edges.
  std::pair<Graph, std::vector<EdgeId>> remove_edges(const std::vector<EdgeId>& drop) const {
    std::vector<char> dropped(edges_.size(), 0);
    for (EdgeId e : drop) {
      check_edge(e);
      dropped[static_cast<std::size_t>(e)] = 1;
    }
    std::vector<EdgeId> remap(edges_.size(), -1);
    std::vector<std::pair<int, int>> kept;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      if (dropped[e]) continue;
      remap[e] = static_cast<EdgeId>(kept.size());
      kept.push_back({edges_[e].u, edges_[e].v});
    }
    return {from_edges(n_, kept), std::move(remap)};
  }

  // Per-vertex incidence bitmasks; usable when edge_count() <= 32.
  std::vector<std::uint32_t> incidence_masks() const {
    std::vector<std::uint32_t> masks(static_cast<std::size_t>(n_), 0);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      masks[static_cast<std::size_t>(edges_[e].u)] |= (1u << e);
      masks[static_cast<std::size_t>(edges_[e].v)] |= (1u << e);
    }
    return masks;
  }

  bool operator==(const Graph&) const = default;

private:
  void check_edge(EdgeId e) const {
    if (e < 0 || e >= edge_count())
      throw HolantError(Errc::invalid_argument, "edge id out of range");
  }

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> incidence_;
};

// Binary edge configuration (the subset S of occupied edges), bit-packed.
class EdgeConfig {
public:
  EdgeConfig() = default;
  explicit EdgeConfig(int n_edges)
      : m_(n_edges), bits_(static_cast<std::size_t>((n_edges + 63) / 64), 0) {}

  static EdgeConfig from_mask(int n_edges, std::uint64_t mask) {
    EdgeConfig c(n_edges);
    if (n_edges > 0) c.bits_[0] = mask;
    return c;
  }

  int size() const { return m_; }

  bool get(EdgeId e) const {
    return (bits_[static_cast<std::size_t>(e) >> 6] >> (e & 63)) & 1u;
  }

  void set(EdgeId e, bool value) {
    std::uint64_t bit = 1ULL << (e & 63);
    if (value)
      bits_[static_cast<std::size_t>(e) >> 6] |= bit;
    else
      bits_[static_cast<std::size_t>(e) >> 6] &= ~bit;
  }

  int count() const {
    int c = 0;
    for (std::uint64_t w : bits_) c += __builtin_popcountll(w);
    return c;
  }

  std::uint64_t low_mask() const { return bits_.empty() ? 0 : bits_[0]; }

  std::vector<EdgeId> occupied() const {
    std::vector<EdgeId> out;
    for (EdgeId e = 0; e < m_; ++e)
      if (get(e)) out.push_back(e);
    return out;
  }

  int hamming_distance(const EdgeConfig& other) const {
    int d = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      d += __builtin_popcountll(bits_[i] ^ other.bits_[i]);
    return d;
  }

  bool operator==(const EdgeConfig&) const = default;

private:
  int m_ = 0;
  std::vector<std::uint64_t> bits_;
};

// Partial configuration tau on a domain Lambda of edges. Kept sorted by
// edge id. Positive marginal probability is checked by the exact oracle at
// use sites, not here.
struct Pinning {
  std::vector<EdgeId> domain;          // strictly ascending
  std::vector<std::uint8_t> values;    // parallel to domain, 0/1

  static Pinning empty() { return {}; }

  static Pinning single(EdgeId e, bool value) {
    Pinning p;
    p.domain.push_back(e);
    p.values.push_back(value ? 1 : 0);
    return p;
  }

  int size() const { return static_cast<int>(domain.size()); }

  bool contains(EdgeId e) const {
    return std::binary_search(domain.begin(), domain.end(), e);
  }

  Pinning with(EdgeId e, bool value) const {
    Pinning p = *this;
    auto it = std::lower_bound(p.domain.begin(), p.domain.end(), e);
    if (it != p.domain.end() && *it == e)
      throw HolantError(Errc::invalid_argument, "edge already pinned");
    auto idx = it - p.domain.begin();
    p.domain.insert(it, e);
    p.values.insert(p.values.begin() + idx, value ? 1 : 0);
    return p;
  }

  // Bitmask views, valid when all edge ids are < 32.
  std::uint32_t domain_mask() const {
    std::uint32_t m = 0;
    for (EdgeId e : domain) m |= (1u << e);
    return m;
  }
  std::uint32_t value_mask() const {
    std::uint32_t m = 0;
    for (std::size_t i = 0; i < domain.size(); ++i)
      if (values[i]) m |= (1u << domain[i]);
    return m;
  }
};

// ---------------------------------------------------------------------------
// Generators

struct GenSpec {
  enum class Kind {
    path,          // n vertices, n-1 edges
    cycle,         // n >= 3
    complete,      // K_n
    star,          // center 0, n-1 leaves
    random,        // n vertices, uniform edge-addition sequences, degree <= max_degree
    pendant_path,  // path v_0..v_n (n = path length) plus pendants u_i v_i, 1 <= i < n;
                   // path edges take ids 0..n-1, pendant edges follow, u_i has id n+i
  };
  Kind kind = Kind::path;
  int n = 0;
  int max_degree = 0;   // random only
  int max_edges = -1;   // random only; -1 = add until no pair is allowed
};

inline Graph gen_graph(const GenSpec& spec, std::uint64_t seed) {
  using Kind = GenSpec::Kind;
  if (spec.n < 0) throw HolantError(Errc::invalid_argument, "negative vertex count");
  std::vector<std::pair<int, int>> pairs;
  switch (spec.kind) {
    case Kind::path:
      for (int i = 0; i + 1 < spec.n; ++i) pairs.push_back({i, i + 1});
      return Graph::from_edges(spec.n, pairs);
    case Kind::cycle:
      if (spec.n < 3) throw HolantError(Errc::invalid_argument, "cycle needs n >= 3");
      for (int i = 0; i + 1 < spec.n; ++i) pairs.push_back({i, i + 1});
      pairs.push_back({spec.n - 1, 0});
      return Graph::from_edges(spec.n, pairs);
    case Kind::complete:
      for (int i = 0; i < spec.n; ++i)
        for (int j = i + 1; j < spec.n; ++j) pairs.push_back({i, j});
      return Graph::from_edges(spec.n, pairs);
    case Kind::star:
      for (int i = 1; i < spec.n; ++i) pairs.push_back({0, i});
      return Graph::from_edges(spec.n, pairs);
    case Kind::pendant_path:
      if (spec.n < 2)
        throw HolantError(Errc::invalid_argument, "pendant path needs length >= 2");
      for (int i = 1; i <= spec.n; ++i) pairs.push_back({i - 1, i});
      for (int i = 1; i < spec.n; ++i) pairs.push_back({i, spec.n + i});
      return Graph::from_edges(2 * spec.n, pairs);
    case Kind::random: {
      if (spec.max_degree < 1)
        throw HolantError(Errc::invalid_argument, "random graph needs max_degree >= 1");
      Rng rng(seed);
      std::vector<int> deg(static_cast<std::size_t>(spec.n), 0);
      std::set<std::pair<int, int>> used;
      std::vector<std::pair<int, int>> allowed;
      while (spec.max_edges < 0 ||
             static_cast<int>(pairs.size()) < spec.max_edges) {
        allowed.clear();
        for (int i = 0; i < spec.n; ++i) {
          if (deg[static_cast<std::size_t>(i)] >= spec.max_degree) continue;
          for (int j = i + 1; j < spec.n; ++j) {
            if (deg[static_cast<std::size_t>(j)] >= spec.max_degree) continue;
            if (used.count({i, j})) continue;
            allowed.push_back({i, j});
          }
        }
        if (allowed.empty()) break;
        auto pick = allowed[rng.next_below(static_cast<std::uint32_t>(allowed.size()))];
        used.insert(pick);
        pairs.push_back(pick);
        ++deg[static_cast<std::size_t>(pick.first)];
        ++deg[static_cast<std::size_t>(pick.second)];
      }
      return Graph::from_edges(spec.n, pairs);
    }
  }
  throw HolantError(Errc::invalid_argument, "unknown generator kind");
}

// ---------------------------------------------------------------------------
// Text format: `n m` on the first data line, then m lines `u v [lambda]`
// with 0-based vertex ids; lambda defaults to 1.0; `#` starts a comment.

struct ParsedGraph {
  Graph graph;
  std::vector<double> lambdas;
};

inline ParsedGraph parse_graph_text(std::istream& in) {
  auto next_data_line = [&](std::string& line) -> bool {
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
    }
    return false;
  };
  std::string line;
  if (!next_data_line(line))
    throw HolantError(Errc::parse_error, "graph file: missing header line");
  std::istringstream head(line);
  long long n = -1, m = -1;
  if (!(head >> n >> m) || n < 0 || m < 0)
    throw HolantError(Errc::parse_error, "graph file: bad header, expected `n m`");
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> lambdas;
  for (long long i = 0; i < m; ++i) {
    if (!next_data_line(line))
      throw HolantError(Errc::parse_error, "graph file: fewer edges than declared");
    std::istringstream ls(line);
    long long u, v;
    double lam = 1.0;
    if (!(ls >> u >> v))
      throw HolantError(Errc::parse_error, "graph file: bad edge line");
    ls >> lam;  // optional third column
    pairs.push_back({static_cast<int>(u), static_cast<int>(v)});
    lambdas.push_back(lam);
  }
  ParsedGraph out;
  out.graph = Graph::from_edges(static_cast<int>(n), pairs);  // rejects loops/multi-edges
  out.lambdas = std::move(lambdas);
  return out;
}

inline void write_graph_text(std::ostream& os, const Graph& g,
                             std::span<const double> lambdas) {
  os << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    Edge ed = g.edge(e);
    os << ed.u << ' ' << ed.v;
    if (!lambdas.empty()) os << ' ' << lambdas[static_cast<std::size_t>(e)];
    os << '\n';
  }
}

}  // namespace holant
