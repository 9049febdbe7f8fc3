// Exact small-instance ground truth by exhaustive enumeration: |C_max| pmfs
// for G(n,p), the percolated configuration multigraph, and G(n,m,p), plus
// total-variation distance.  Component extraction here is a standalone DFS,
// deliberately independent of the union-find used by the samplers.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "critlab/common.hpp"
#include "critlab/stats.hpp"

namespace critlab {

using u128 = unsigned __int128;

struct ExactPmf {
  std::string model;
  std::vector<std::pair<std::uint64_t, double>> support;  // (size, prob), size ascending
  // Exact mode: support[i].second == nums[i] / den.
  std::vector<u128> nums;
  u128 den = 0;

  bool exact() const { return den != 0; }

  double prob_of(std::uint64_t size) const {
    for (const auto& [s, p] : support)
      if (s == size) return p;
    return 0.0;
  }

  void validate() const {
    KahanSum sum;
    for (const auto& [s, p] : support) sum.add(p);
    if (std::fabs(sum.value() - 1.0) > 1e-12)
      throw invariant_error("ExactPmf: probabilities do not sum to 1");
    if (exact()) {
      u128 total = 0;
      for (const auto w : nums) total += w;
      if (total != den) throw invariant_error("ExactPmf: exact weights do not sum to den");
    }
  }
};

inline double tv_distance(const ExactPmf& a, const ExactPmf& b) {
  KahanSum acc;
  std::vector<std::uint64_t> sizes;
  for (const auto& [s, p] : a.support) sizes.push_back(s);
  for (const auto& [s, p] : b.support) sizes.push_back(s);
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  for (const auto s : sizes) acc.add(std::fabs(a.prob_of(s) - b.prob_of(s)));
  return 0.5 * acc.value();
}

inline ExactPmf pmf_from_samples(const std::vector<std::uint64_t>& samples,
                                 const std::string& model = "empirical") {
  if (samples.empty()) throw std::invalid_argument("pmf_from_samples: empty sample set");
  std::vector<std::uint64_t> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  ExactPmf pmf;
  pmf.model = model;
  const double inv = 1.0 / static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    pmf.support.emplace_back(sorted[i], static_cast<double>(j - i) * inv);
    i = j;
  }
  return pmf;
}

// CSV serialization: header then one `size,prob` row per support point.
inline void write_pmf_csv(std::ostream& os, const ExactPmf& pmf) {
  os << "size,prob\n";
  for (const auto& [s, p] : pmf.support) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", p);
    os << s << ',' << std::string_view(buf, static_cast<std::size_t>(len)) << '\n';
  }
}

namespace detail {

// Largest component over an explicit edge set on few vertices, by DFS.
inline std::uint64_t cmax_dfs(std::uint64_t n,
                              const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& [u, v] : edges) {
    if (u == v) continue;  // self-loops do not change connectivity
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  std::vector<char> seen(n, 0);
  std::uint64_t best = 0;
  std::vector<int> stack;
  for (std::uint64_t v0 = 0; v0 < n; ++v0) {
    if (seen[v0]) continue;
    std::uint64_t size = 0;
    stack.push_back(static_cast<int>(v0));
    seen[v0] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      ++size;
      for (const int w : adj[static_cast<std::size_t>(v)]) {
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    best = std::max(best, size);
  }
  return best;
}

inline ExactPmf pmf_from_weights(std::string model, std::uint64_t n,
                                 const std::vector<double>& probs,
                                 const std::vector<u128>& weights, u128 den) {
  ExactPmf pmf;
  pmf.model = std::move(model);
  for (std::uint64_t s = 1; s <= n; ++s) {
    if (probs[s] > 0.0 || (den != 0 && weights[s] != 0)) {
      pmf.support.emplace_back(s, probs[s]);
      if (den != 0) pmf.nums.push_back(weights[s]);
    }
  }
  pmf.den = den;
  pmf.validate();
  return pmf;
}

}  // namespace detail

// Exact |C_max| pmf of G(n,p) over all 2^{C(n,2)} edge subsets.  When
// (p_num, p_den) are supplied the pmf also carries exact rational weights
// with denominator p_den^{C(n,2)}.
inline ExactPmf er_exact(std::uint64_t n, double p, std::uint64_t p_num = 0,
                         std::uint64_t p_den = 0) {
  if (n < 1 || n > 6) throw std::invalid_argument("er_exact: need 1 <= n <= 6");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("er_exact: p outside [0,1]");
  const bool exact = p_den != 0;
  if (exact && p_num > p_den) throw std::invalid_argument("er_exact: bad rational p");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < static_cast<int>(n); ++i)
    for (int j = i + 1; j < static_cast<int>(n); ++j) pairs.emplace_back(i, j);
  const std::size_t c = pairs.size();

  std::vector<double> weight_by_count(c + 1);
  std::vector<u128> exact_by_count(c + 1, 0);
  for (std::size_t k = 0; k <= c; ++k) {
    weight_by_count[k] =
        std::pow(p, static_cast<double>(k)) * std::pow(1.0 - p, static_cast<double>(c - k));
    if (exact) {
      u128 w = 1;
      for (std::size_t i = 0; i < k; ++i) w *= p_num;
      for (std::size_t i = 0; i < c - k; ++i) w *= (p_den - p_num);
      exact_by_count[k] = w;
    }
  }
  u128 den = 0;
  if (exact) {
    den = 1;
    for (std::size_t i = 0; i < c; ++i) den *= p_den;
  }

  std::vector<double> probs(n + 1, 0.0);
  std::vector<u128> weights(n + 1, 0);
  std::vector<std::pair<int, int>> edges;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << c); ++mask) {
    edges.clear();
    for (std::size_t e = 0; e < c; ++e)
      if (mask & (std::uint64_t{1} << e)) edges.push_back(pairs[e]);
    const std::uint64_t cmax = detail::cmax_dfs(n, edges);
    const auto k = static_cast<std::size_t>(__builtin_popcountll(mask));
    probs[cmax] += weight_by_count[k];
    if (exact) weights[cmax] += exact_by_count[k];
  }
  return detail::pmf_from_weights("er_exact", n, probs, weights, den);
}

struct ConfigExactResult {
  ExactPmf multigraph;        // percolated configuration multigraph
  ExactPmf simple_conditioned;
  std::uint64_t matchings = 0;          // (dn-1)!!
  std::uint64_t simple_matchings = 0;
};

namespace detail {

inline void enumerate_matchings(std::vector<int>& partner, std::vector<char>& used,
                                const std::function<void(const std::vector<int>&)>& emit) {
  const std::size_t s = partner.size();
  std::size_t first = s;
  for (std::size_t i = 0; i < s; ++i)
    if (!used[i]) {
      first = i;
      break;
    }
  if (first == s) {
    emit(partner);
    return;
  }
  used[first] = 1;
  for (std::size_t j = first + 1; j < s; ++j) {
    if (used[j]) continue;
    used[j] = 1;
    partner[first] = static_cast<int>(j);
    partner[j] = static_cast<int>(first);
    enumerate_matchings(partner, used, emit);
    used[j] = 0;
  }
  used[first] = 0;
}

}  // namespace detail

// Exact pmfs over all (dn-1)!! stub matchings and 2^{dn/2} percolation
// outcomes; dn <= 10.  Also returns the variant conditioned on the multigraph
// being simple.
inline ConfigExactResult config_exact(std::uint64_t n, std::uint32_t d, double p,
                                      std::uint64_t p_num = 0, std::uint64_t p_den = 0) {
  if (d < 3) throw std::invalid_argument("config_exact: d must be >= 3");
  const std::uint64_t stubs = n * d;
  if (stubs % 2 != 0) throw std::invalid_argument("config_exact: dn must be even");
  if (stubs > 10) throw std::invalid_argument("config_exact: dn must be <= 10");
  const bool exact = p_den != 0;
  const std::size_t n_edges = stubs / 2;

  std::vector<double> probs_multi(n + 1, 0.0), probs_simple(n + 1, 0.0);
  std::vector<u128> w_multi(n + 1, 0), w_simple(n + 1, 0);
  std::uint64_t matchings = 0, simple_matchings = 0;

  std::vector<double> weight_by_count(n_edges + 1);
  std::vector<u128> exact_by_count(n_edges + 1, 0);
  for (std::size_t k = 0; k <= n_edges; ++k) {
    weight_by_count[k] = std::pow(p, static_cast<double>(k)) *
                         std::pow(1.0 - p, static_cast<double>(n_edges - k));
    if (exact) {
      u128 w = 1;
      for (std::size_t i = 0; i < k; ++i) w *= p_num;
      for (std::size_t i = 0; i < n_edges - k; ++i) w *= (p_den - p_num);
      exact_by_count[k] = w;
    }
  }

  std::vector<int> partner(stubs, -1);
  std::vector<char> used(stubs, 0);
  std::vector<std::pair<int, int>> all_edges, kept;
  const std::function<void(const std::vector<int>&)> emit = [&](const std::vector<int>& m) {
    ++matchings;
    all_edges.clear();
    bool simple = true;
    for (std::size_t s = 0; s < stubs; ++s) {
      if (static_cast<std::size_t>(m[s]) < s) continue;
      const int u = static_cast<int>(s / d);
      const int v = m[s] / static_cast<int>(d);
      if (u == v) simple = false;
      for (const auto& e : all_edges)
        if ((e.first == u && e.second == v) || (e.first == v && e.second == u)) simple = false;
      all_edges.emplace_back(u, v);
    }
    if (simple) ++simple_matchings;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n_edges); ++mask) {
      kept.clear();
      for (std::size_t e = 0; e < n_edges; ++e)
        if (mask & (std::uint64_t{1} << e)) kept.push_back(all_edges[e]);
      const std::uint64_t cmax = detail::cmax_dfs(n, kept);
      const auto k = static_cast<std::size_t>(__builtin_popcountll(mask));
      probs_multi[cmax] += weight_by_count[k];
      if (simple) probs_simple[cmax] += weight_by_count[k];
      if (exact) {
        w_multi[cmax] += exact_by_count[k];
        if (simple) w_simple[cmax] += exact_by_count[k];
      }
    }
  };
  detail::enumerate_matchings(partner, used, emit);

  ConfigExactResult res;
  res.matchings = matchings;
  res.simple_matchings = simple_matchings;
  const double inv_m = 1.0 / static_cast<double>(matchings);
  for (auto& x : probs_multi) x *= inv_m;
  u128 den_multi = 0;
  if (exact) {
    den_multi = matchings;
    for (std::size_t i = 0; i < n_edges; ++i) den_multi *= p_den;
  }
  res.multigraph = detail::pmf_from_weights("config_exact", n, probs_multi, w_multi, den_multi);
  if (simple_matchings > 0) {
    const double inv_s = 1.0 / static_cast<double>(simple_matchings);
    for (auto& x : probs_simple) x *= inv_s;
    u128 den_simple = 0;
    if (exact) {
      den_simple = simple_matchings;
      for (std::size_t i = 0; i < n_edges; ++i) den_simple *= p_den;
    }
    res.simple_conditioned =
        detail::pmf_from_weights("config_exact_simple", n, probs_simple, w_simple, den_simple);
  }
  return res;
}

// Exact V-side |C_max| pmf of G(n,m,p) over all 2^{nm} bipartite subsets.
inline ExactPmf intersection_exact(std::uint64_t n, std::uint64_t m, double p,
                                   std::uint64_t p_num = 0, std::uint64_t p_den = 0) {
  const std::uint64_t slots = n * m;
  if (slots > 20) throw std::invalid_argument("intersection_exact: need nm <= 20");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("intersection_exact: p outside [0,1]");
  const bool exact = p_den != 0;

  std::vector<double> weight_by_count(slots + 1);
  std::vector<u128> exact_by_count(slots + 1, 0);
  for (std::size_t k = 0; k <= slots; ++k) {
    weight_by_count[k] = std::pow(p, static_cast<double>(k)) *
                         std::pow(1.0 - p, static_cast<double>(slots - k));
    if (exact) {
      u128 w = 1;
      for (std::size_t i = 0; i < k; ++i) w *= p_num;
      for (std::size_t i = 0; i < slots - k; ++i) w *= (p_den - p_num);
      exact_by_count[k] = w;
    }
  }
  u128 den = 0;
  if (exact) {
    den = 1;
    for (std::size_t i = 0; i < slots; ++i) den *= p_den;
  }

  std::vector<double> probs(n + 1, 0.0);
  std::vector<u128> weights(n + 1, 0);
  std::vector<int> root(n);
  // slot index: v * m + w
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << slots); ++mask) {
    for (std::size_t v = 0; v < n; ++v) root[v] = static_cast<int>(v);
    const auto find = [&](int x) {
      while (root[static_cast<std::size_t>(x)] != x) {
        root[static_cast<std::size_t>(x)] =
            root[static_cast<std::size_t>(root[static_cast<std::size_t>(x)])];
        x = root[static_cast<std::size_t>(x)];
      }
      return x;
    };
    for (std::uint64_t w = 0; w < m; ++w) {
      int first = -1;
      for (std::uint64_t v = 0; v < n; ++v) {
        if (mask & (std::uint64_t{1} << (v * m + w))) {
          if (first < 0)
            first = static_cast<int>(v);
          else
            root[static_cast<std::size_t>(find(static_cast<int>(v)))] = find(first);
        }
      }
    }
    std::vector<std::uint8_t> count(n, 0);
    std::uint64_t cmax = 1;
    for (std::uint64_t v = 0; v < n; ++v) {
      const auto r = static_cast<std::size_t>(find(static_cast<int>(v)));
      ++count[r];
      if (count[r] > cmax) cmax = count[r];
    }
    const auto k = static_cast<std::size_t>(__builtin_popcountll(mask));
    probs[cmax] += weight_by_count[k];
    if (exact) weights[cmax] += exact_by_count[k];
  }
  return detail::pmf_from_weights("intersection_exact", n, probs, weights, den);
}

}  // namespace critlab
