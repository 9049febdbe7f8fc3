// Explicit graphs: edge lists, union-find components, circulant construction
// and bond percolation.  Ground truth for validating the lazy explorations.

#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "critlab/rng.hpp"

namespace critlab {

struct EdgeList {
  std::uint64_t n = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

  std::size_t component_size(std::size_t x) { return size_[find(x)]; }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

// Multiset of component sizes, ascending.
inline std::vector<std::uint64_t> components_unionfind(std::uint64_t n,
                                                       const EdgeList& graph) {
  UnionFind uf(n);
  for (const auto& [u, v] : graph.edges) {
    if (u >= n || v >= n) throw std::invalid_argument("components_unionfind: vertex id out of range");
    uf.unite(u, v);
  }
  std::vector<std::uint64_t> sizes;
  for (std::uint64_t v = 0; v < n; ++v)
    if (uf.find(v) == v) sizes.push_back(uf.component_size(v));
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

// Circulant graph: offsets 1..floor(d/2), plus the antipodal offset n/2 when
// d is odd (requires n even).
inline EdgeList circulant(std::uint64_t n, std::uint32_t d) {
  if (d >= n) throw std::invalid_argument("circulant: need d < n");
  if (d % 2 == 1 && n % 2 == 1)
    throw std::invalid_argument("circulant: odd d needs even n");
  EdgeList g;
  g.n = n;
  for (std::uint64_t v = 0; v < n; ++v)
    for (std::uint32_t k = 1; k <= d / 2; ++k)
      g.edges.emplace_back(static_cast<std::uint32_t>(v),
                           static_cast<std::uint32_t>((v + k) % n));
  if (d % 2 == 1)
    for (std::uint64_t v = 0; v < n / 2; ++v)
      g.edges.emplace_back(static_cast<std::uint32_t>(v),
                           static_cast<std::uint32_t>(v + n / 2));
  return g;
}

inline EdgeList percolate(const EdgeList& graph, double p, Stream& rng) {
  EdgeList out;
  out.n = graph.n;
  for (const auto& e : graph.edges)
    if (bernoulli(p, rng)) out.edges.push_back(e);
  return out;
}

inline std::vector<std::vector<std::uint32_t>> adjacency(const EdgeList& graph) {
  std::vector<std::vector<std::uint32_t>> adj(graph.n);
  for (const auto& [u, v] : graph.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

// Serialization: first line "n m_edges", then one "u v" pair per line.
inline void write_edge_list(std::ostream& os, const EdgeList& graph) {
  os << graph.n << ' ' << graph.edges.size() << '\n';
  for (const auto& [u, v] : graph.edges) os << u << ' ' << v << '\n';
}

inline EdgeList read_edge_list(std::istream& is) {
  EdgeList g;
  std::uint64_t m = 0;
  if (!(is >> g.n >> m)) throw std::invalid_argument("read_edge_list: bad header");
  g.edges.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    std::uint32_t u = 0, v = 0;
    if (!(is >> u >> v)) throw std::invalid_argument("read_edge_list: truncated edge list");
    g.edges.emplace_back(u, v);
  }
  return g;
}

}  // namespace critlab
