// The four model drivers: lazy exploration steppers for G(n,p), the
// percolated configuration multigraph, the random intersection graph and the
// reduced quantum process, together with explicit generators for
// cross-validation (materialized ER / bipartite graphs, rejection-sampled
// simple regular graphs, the direct interval-level quantum sampler).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "critlab/common.hpp"
#include "critlab/critical_curve.hpp"
#include "critlab/explore.hpp"
#include "critlab/graph.hpp"
#include "critlab/rng.hpp"

namespace critlab {

struct ErParams {
  std::uint64_t n = 0;
  double p = 0.0;
};

struct RegParams {
  std::uint64_t n = 0;
  std::uint32_t d = 0;
  double p = 0.0;
};

struct IntersectionParams {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  double beta = 1.0;
  double p = 0.0;
};

struct QuantumParams {
  double beta = 0.0;
  double lambda = 0.0;
  double theta = 0.0;  // = lambda * beta
  std::uint64_t n = 0;
};

using ModelParams = std::variant<ErParams, RegParams, IntersectionParams, QuantumParams>;

inline void validate(const ErParams& p) {
  if (p.n < 1) throw std::invalid_argument("er: n must be >= 1");
  if (!(p.p >= 0.0 && p.p <= 1.0)) throw std::invalid_argument("er: p outside [0,1]");
}

inline void validate(const RegParams& p) {
  if (p.d < 3) throw std::invalid_argument("regular: d must be >= 3");
  if ((p.n * p.d) % 2 != 0) throw std::invalid_argument("regular: dn must be even");
  if (!(p.p >= 0.0 && p.p <= 1.0)) throw std::invalid_argument("regular: p outside [0,1]");
}

inline void validate(const IntersectionParams& p) {
  if (p.n < 1 || p.m < 1) throw std::invalid_argument("intersection: n, m must be >= 1");
  if (!(p.p >= 0.0 && p.p <= 1.0)) throw std::invalid_argument("intersection: p outside [0,1]");
}

inline void validate(const QuantumParams& p) {
  if (p.n < 1) throw std::invalid_argument("quantum: n must be >= 1");
  if (!(p.theta > 0.0) || !(p.lambda > 0.0))
    throw std::invalid_argument("quantum: theta and lambda must be > 0");
}

// Criticality defaults, computed rather than hard-coded.
inline ErParams er_critical(std::uint64_t n) { return {n, 1.0 / static_cast<double>(n)}; }

inline RegParams regular_critical(std::uint64_t n, std::uint32_t d) {
  return {n, d, 1.0 / static_cast<double>(d - 1)};
}

inline IntersectionParams intersection_critical(std::uint64_t n, double beta = 1.0) {
  IntersectionParams p;
  p.n = n;
  p.beta = beta;
  p.m = static_cast<std::uint64_t>(std::floor(beta * static_cast<double>(n)));
  if (p.m < 1) throw std::invalid_argument("intersection_critical: floor(beta*n) must be >= 1");
  p.p = 1.0 / std::sqrt(static_cast<double>(n) * static_cast<double>(p.m));
  return p;
}

inline QuantumParams quantum_critical(std::uint64_t n, double lambda = 1.0) {
  QuantumParams p;
  p.n = n;
  p.lambda = lambda;
  p.beta = critical_beta(lambda);
  p.theta = p.lambda * p.beta;
  return p;
}

inline std::string model_name(const ModelParams& m) {
  if (std::holds_alternative<ErParams>(m)) return "er";
  if (std::holds_alternative<RegParams>(m)) return "regular";
  if (std::holds_alternative<IntersectionParams>(m)) return "intersection";
  return "quantum";
}

inline std::uint64_t model_n(const ModelParams& m) {
  return std::visit([](const auto& p) { return p.n; }, m);
}

// ---------------------------------------------------------------------------
// G(n,p): lazy stepper and explicit generator.
// ---------------------------------------------------------------------------

// eta_t ~ Bin(U_{t-1} - 1{R_{t-1}=0}, p) with U_{t-1} = n - (t-1) - R_{t-1}.
class ErStepper {
 public:
  static constexpr bool vertex_consuming = true;

  explicit ErStepper(ErParams params) : params_(params) { validate(params_); }

  std::uint64_t horizon() const { return params_.n; }
  std::int64_t initial_active() const { return 1; }

  StepResult step(std::uint64_t t, std::int64_t r_prev, Stream& rng) {
    const std::int64_t u_prev =
        static_cast<std::int64_t>(params_.n) - static_cast<std::int64_t>(t - 1) - r_prev;
    if (u_prev < 0) throw invariant_error("er_step: unseen count went negative");
    const std::int64_t m = u_prev - (r_prev == 0 ? 1 : 0);
    if (m < 0) throw invariant_error("er_step: no unseen vertex left to seed");
    const auto eta = binomial(static_cast<std::uint64_t>(m), params_.p, rng);
    return {static_cast<std::int64_t>(eta), 1};
  }

 private:
  ErParams params_;
};

// Exploration over a materialized adjacency with FIFO activation order;
// component sizes equal the graph's components exactly, per instance.
class AdjacencyStepper {
 public:
  static constexpr bool vertex_consuming = true;

  explicit AdjacencyStepper(const EdgeList& graph)
      : n_(graph.n), adj_(adjacency(graph)), status_(graph.n, 0) {
    if (n_ == 0) throw std::invalid_argument("AdjacencyStepper: empty graph");
    status_[0] = 1;
    queue_.push_back(0);
  }

  std::uint64_t horizon() const { return n_; }
  std::int64_t initial_active() const { return 1; }

  StepResult step(std::uint64_t, std::int64_t r_prev, Stream&) {
    std::uint32_t u = 0;
    if (r_prev >= 1) {
      u = queue_[head_++];
    } else {
      while (scan_ < n_ && status_[scan_] != 0) ++scan_;
      if (scan_ >= n_) throw invariant_error("AdjacencyStepper: no vertex left");
      u = static_cast<std::uint32_t>(scan_);
    }
    std::int64_t eta = 0;
    for (const auto w : adj_[u]) {
      if (status_[w] == 0) {
        status_[w] = 1;
        queue_.push_back(w);
        ++eta;
      }
    }
    status_[u] = 2;
    return {eta, 1};
  }

 private:
  std::uint64_t n_ = 0;
  std::vector<std::vector<std::uint32_t>> adj_;
  std::vector<std::uint8_t> status_;  // 0 unseen, 1 active, 2 explored
  std::vector<std::uint32_t> queue_;
  std::size_t head_ = 0;
  std::uint64_t scan_ = 0;
};

// Skip-sampled edge list via geometric gaps over the C(n,2) slots.
inline EdgeList er_materialize(const ErParams& params, Stream& rng) {
  validate(params);
  EdgeList g;
  g.n = params.n;
  const std::uint64_t n = params.n;
  const std::uint64_t total = n * (n - 1) / 2;
  if (params.p <= 0.0 || total == 0) return g;
  std::uint64_t row = 0;
  std::uint64_t row_start = 0;  // slot index of (row, row+1)
  auto unrank = [&](std::uint64_t s) {
    while (s - row_start >= n - 1 - row) {
      row_start += n - 1 - row;
      ++row;
    }
    return std::pair<std::uint32_t, std::uint32_t>(
        static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(row + 1 + (s - row_start)));
  };
  if (params.p >= 1.0) {
    g.edges.reserve(total);
    for (std::uint64_t s = 0; s < total; ++s) g.edges.push_back(unrank(s));
    return g;
  }
  const double log1mp = std::log1p(-params.p);
  std::uint64_t idx = 0;
  for (;;) {
    const double gap_d = std::floor(std::log(rng.next_unit_open()) / log1mp);
    if (gap_d >= static_cast<double>(total)) break;  // jumped past the end
    idx += static_cast<std::uint64_t>(gap_d);
    if (idx >= total) break;
    g.edges.push_back(unrank(idx));
    ++idx;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Percolated configuration multigraph G'(p): stub-level exploration.
// ---------------------------------------------------------------------------

struct ConfigStepInfo {
  std::int64_t eta = 0;
  std::int64_t eta_lower = 0;  // eta' when R>0, eta'' when R=0
  bool r_was_zero = false;
  bool retained = false;   // J_t
  bool h_unseen = false;
  std::uint64_t v_full_count = 0;   // |V^(d)_t| after the step
  std::uint64_t active_stubs = 0;   // R_t from internal accounting
};

// Follows the stub pairing step by step: pick an active stub (stack order),
// match it with a uniform unmatched stub, keep the edge with probability p.
// Vertex counting: one per seed plus one per step where h_t is unseen and
// J_t = 1.  Vertices whose stubs are all consumed passively with J_t = 0 are
// isolated singletons of G'(p) and are reported via untracked_singletons().
class ConfigStepper {
 public:
  static constexpr bool vertex_consuming = false;

  ConfigStepper(RegParams params, Stream& rng) : params_(params) {
    validate(params_);
    const std::uint64_t n = params_.n;
    const std::uint32_t d = params_.d;
    const std::uint64_t stubs = n * d;
    unseen_count_.assign(n, d);
    touched_.assign(n, 0);
    vk_.assign(d + 1, 0);
    vk_[d] = n;
    state_.assign(stubs, kUnseen);
    unmatched_.resize(stubs);
    pos_.resize(stubs);
    for (std::uint64_t s = 0; s < stubs; ++s) {
      unmatched_[s] = s;
      pos_[s] = s;
    }
    unmatched_count_ = stubs;
    active_count_ = 0;
    // seed component: a uniform vertex with all d stubs active; its vertex
    // credit is attached to the first step
    const std::uint64_t v0 = rng.below(n);
    activate_vertex(v0);
    touched_[v0] = 1;
    ++touched_total_;
    pending_seed_credit_ = 1;
  }

  std::uint64_t horizon() const { return params_.n * params_.d / 2; }
  std::int64_t initial_active() const { return static_cast<std::int64_t>(params_.d); }

  const ConfigStepInfo& last() const { return info_; }
  std::uint64_t untracked_singletons() const { return params_.n - touched_total_; }

  StepResult step(std::uint64_t t, std::int64_t r_prev, Stream& rng) {
    info_ = ConfigStepInfo{};
    info_.r_was_zero = (r_prev == 0);
    const std::uint32_t d = params_.d;
    std::uint32_t vertices = pending_seed_credit_;
    pending_seed_credit_ = 0;
    std::uint64_t e_stub;
    std::uint64_t seed_vertex = kNoVertex;

    if (r_prev == 0) {
      if (unmatched_count_ == 0) throw invariant_error("config: no stubs left");
      // with no active stubs every unmatched stub is unseen
      e_stub = unmatched_[rng.below(unmatched_count_)];
      seed_vertex = e_stub / d;
      activate_vertex(seed_vertex);
      touched_[seed_vertex] = 1;
      ++touched_total_;
      ++vertices;
    } else {
      e_stub = pop_active();
    }

    explore_stub(e_stub);
    if (state_is_active_removed_) --active_count_;

    if (unmatched_count_ == 0) throw invariant_error("config: odd stub count");
    const std::uint64_t h_stub = unmatched_[rng.below(unmatched_count_)];
    const bool retained = bernoulli(params_.p, rng);
    info_.retained = retained;
    const std::uint64_t w = h_stub / d;
    // pre-step unseen-stub count of v(h); the seed vertex was zeroed above but
    // its stubs are active now, so an unseen h never belongs to it
    const std::uint32_t pre_cnt = unseen_count_[w];
    const bool h_unseen = (state_[h_stub] == kUnseen);
    info_.h_unseen = h_unseen;

    if (h_unseen) {
      // consume h from its vertex
      move_vk(w, pre_cnt, pre_cnt - 1);
      unseen_count_[w] = pre_cnt - 1;
      state_[h_stub] = kExplored;
      remove_unmatched(h_stub);
      if (retained) {
        // remaining unseen stubs of w become active
        if (unseen_count_[w] > 0) {
          move_vk(w, unseen_count_[w], 0);
          const std::uint64_t base = static_cast<std::uint64_t>(w) * d;
          for (std::uint32_t i = 0; i < d; ++i) {
            const std::uint64_t s = base + i;
            if (state_[s] == kUnseen) {
              state_[s] = kActive;
              stack_.push_back(s);
              ++active_count_;
            }
          }
          unseen_count_[w] = 0;
        }
        touched_[w] = 1;
        ++touched_total_;
        ++vertices;
      }
    } else {
      // h is active: both endpoints of this pairing were already in the
      // component; remove h from the active set
      state_[h_stub] = kExplored;
      remove_unmatched(h_stub);
      --active_count_;
    }

    const std::int64_t eta =
        static_cast<std::int64_t>(active_count_) - (r_prev >= 1 ? r_prev - 1 : 0);
    info_.eta = eta;
    info_.active_stubs = active_count_;
    info_.v_full_count = vk_[d];

    // coupled lower bounds from the step's own randomness
    const std::int64_t jd = retained ? static_cast<std::int64_t>(d - 1) : 0;
    const bool v_h_partial_pre = pre_cnt >= 1 && pre_cnt <= d - 1;
    if (r_prev >= 1) {
      const std::int64_t x1 = v_h_partial_pre ? jd : 0;
      const std::int64_t x2 = !h_unseen ? jd + 1 : 0;
      info_.eta_lower = jd - x1 - x2;
    } else {
      const bool in_excluded = v_h_partial_pre || w == seed_vertex;
      info_.eta_lower = jd - (in_excluded ? jd : 0);
    }

    if (check_invariants_) {
      if (vk_[d] + 1 + 2 * t < params_.n)
        throw invariant_error("config: |V^(d)_t| >= n-1-2t violated");
      if (active_count_ > d + 2 * static_cast<std::uint64_t>(d - 1) * t)
        throw invariant_error("config: R_t <= d+2(d-1)t violated");
    }
    return {eta, vertices};
  }

  void set_check_invariants(bool on) { check_invariants_ = on; }

 private:
  static constexpr std::uint8_t kUnseen = 0;
  static constexpr std::uint8_t kActive = 1;
  static constexpr std::uint8_t kExplored = 2;
  static constexpr std::uint64_t kNoVertex = ~std::uint64_t{0};

  void activate_vertex(std::uint64_t v) {
    const std::uint32_t d = params_.d;
    const std::uint32_t cnt = unseen_count_[v];
    if (cnt == 0) return;
    move_vk(v, cnt, 0);
    const std::uint64_t base = v * d;
    for (std::uint32_t i = 0; i < d; ++i) {
      const std::uint64_t s = base + i;
      if (state_[s] == kUnseen) {
        state_[s] = kActive;
        stack_.push_back(s);
        ++active_count_;
      }
    }
    unseen_count_[v] = 0;
  }

  void move_vk(std::uint64_t, std::uint32_t from, std::uint32_t to) {
    --vk_[from];
    ++vk_[to];
  }

  std::uint64_t pop_active() {
    while (!stack_.empty() && state_[stack_.back()] != kActive) stack_.pop_back();
    if (stack_.empty()) throw invariant_error("config: active stack empty");
    const std::uint64_t s = stack_.back();
    stack_.pop_back();
    return s;
  }

  void explore_stub(std::uint64_t s) {
    state_is_active_removed_ = (state_[s] == kActive);
    state_[s] = kExplored;
    remove_unmatched(s);
  }

  void remove_unmatched(std::uint64_t s) {
    const std::uint64_t p = pos_[s];
    const std::uint64_t last = unmatched_[--unmatched_count_];
    unmatched_[p] = last;
    pos_[last] = p;
  }

  RegParams params_;
  std::vector<std::uint32_t> unseen_count_;
  std::vector<std::uint8_t> touched_;
  std::vector<std::uint64_t> vk_;
  std::vector<std::uint8_t> state_;
  std::vector<std::uint64_t> unmatched_;
  std::vector<std::uint64_t> pos_;
  std::uint64_t unmatched_count_ = 0;
  std::uint64_t active_count_ = 0;
  std::vector<std::uint64_t> stack_;
  std::uint64_t touched_total_ = 0;
  std::uint32_t pending_seed_credit_ = 0;
  bool state_is_active_removed_ = false;
  bool check_invariants_ = true;
  ConfigStepInfo info_;
};

struct SimpleRegularResult {
  EdgeList graph;
  std::uint64_t attempts = 0;
  bool ok = false;
};

// Rejection sampling of a uniform simple d-regular graph via the
// configuration model; acceptance rate tends to exp((1-d^2)/4).
inline SimpleRegularResult config_sample_simple(std::uint64_t n, std::uint32_t d, Stream& rng,
                                                std::uint64_t max_tries = 1000) {
  if (d < 3) throw std::invalid_argument("config_sample_simple: d must be >= 3");
  if ((n * d) % 2 != 0) throw std::invalid_argument("config_sample_simple: dn must be even");
  SimpleRegularResult res;
  const std::uint64_t stubs = n * d;
  std::vector<std::uint64_t> arr(stubs);
  const bool use_matrix = n * n <= (std::uint64_t{1} << 26);
  std::vector<std::uint8_t> seen(use_matrix ? n * n : 0, 0);
  for (res.attempts = 1; res.attempts <= max_tries; ++res.attempts) {
    for (std::uint64_t s = 0; s < stubs; ++s) arr[s] = s;
    EdgeList g;
    g.n = n;
    bool simple = true;
    std::uint64_t alive = stubs;
    if (use_matrix) std::fill(seen.begin(), seen.end(), 0);
    while (alive > 0 && simple) {
      const std::uint64_t a = arr[0];
      arr[0] = arr[--alive];
      const std::uint64_t j = rng.below(alive);
      const std::uint64_t b = arr[j];
      arr[j] = arr[--alive];
      const std::uint64_t u = a / d, v = b / d;
      if (u == v) {
        simple = false;
        break;
      }
      if (use_matrix) {
        if (seen[u * n + v]) {
          simple = false;
          break;
        }
        seen[u * n + v] = seen[v * n + u] = 1;
      } else {
        for (const auto& e : g.edges)
          if ((e.first == u && e.second == v) || (e.first == v && e.second == u)) {
            simple = false;
            break;
          }
        if (!simple) break;
      }
      g.edges.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
    }
    if (simple) {
      res.graph = std::move(g);
      res.ok = true;
      return res;
    }
  }
  res.attempts = max_tries;
  return res;
}

inline std::vector<std::uint64_t> regular_percolate_explicit(const EdgeList& graph, double p,
                                                             Stream& rng) {
  const EdgeList kept = percolate(graph, p, rng);
  return components_unionfind(graph.n, kept);
}

// ---------------------------------------------------------------------------
// Random intersection graph G(n,m,p).
// ---------------------------------------------------------------------------

// N_t ~ Bin(m - D_{t-1}, p) fresh attributes, then
// eta_t ~ Bin(U_{t-1} - 1{R=0}, 1 - (1-p)^{N_t}).
class IntersectionStepper {
 public:
  static constexpr bool vertex_consuming = true;

  explicit IntersectionStepper(IntersectionParams params) : params_(params) {
    validate(params_);
  }

  std::uint64_t horizon() const { return params_.n; }
  std::int64_t initial_active() const { return 1; }
  std::uint64_t discovered() const { return discovered_; }

  StepResult step(std::uint64_t t, std::int64_t r_prev, Stream& rng) {
    const std::int64_t u_prev =
        static_cast<std::int64_t>(params_.n) - static_cast<std::int64_t>(t - 1) - r_prev;
    if (u_prev < 0) throw invariant_error("intersection_step: unseen count negative");
    const std::int64_t m_eff = u_prev - (r_prev == 0 ? 1 : 0);
    if (m_eff < 0) throw invariant_error("intersection_step: no unseen vertex to seed");
    const std::uint64_t fresh = binomial(params_.m - discovered_, params_.p, rng);
    discovered_ += fresh;
    double success = 0.0;
    if (fresh > 0)
      success = params_.p >= 1.0
                    ? 1.0
                    : -std::expm1(static_cast<double>(fresh) * std::log1p(-params_.p));
    const auto eta = binomial(static_cast<std::uint64_t>(m_eff), success, rng);
    return {static_cast<std::int64_t>(eta), 1};
  }

 private:
  IntersectionParams params_;
  std::uint64_t discovered_ = 0;  // D_t, non-decreasing, <= m
};

// Skip-sample the bipartite graph B(n,m,p); union-find over V and W; a
// component's size is the number of V-side members it contains.
inline std::vector<std::uint64_t> intersection_materialize(const IntersectionParams& params,
                                                           Stream& rng) {
  validate(params);
  const std::uint64_t n = params.n, m = params.m;
  UnionFind uf(n + m);
  const std::uint64_t total = n * m;
  if (params.p >= 1.0) {
    for (std::uint64_t s = 0; s < total; ++s) uf.unite(s / m, n + (s % m));
  } else if (params.p > 0.0) {
    const double log1mp = std::log1p(-params.p);
    std::uint64_t idx = 0;
    for (;;) {
      const double gap_d = std::floor(std::log(rng.next_unit_open()) / log1mp);
      if (gap_d >= static_cast<double>(total)) break;
      idx += static_cast<std::uint64_t>(gap_d);
      if (idx >= total) break;
      uf.unite(idx / m, n + (idx % m));
      ++idx;
    }
  }
  std::vector<std::uint64_t> v_count(n + m, 0);
  for (std::uint64_t v = 0; v < n; ++v) ++v_count[uf.find(v)];
  std::vector<std::uint64_t> sizes;
  for (std::uint64_t i = 0; i < n + m; ++i)
    if (v_count[i] > 0) sizes.push_back(v_count[i]);
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

// ---------------------------------------------------------------------------
// Quantum random graph G(n, beta, lambda) in its G_{n,theta} representation.
// ---------------------------------------------------------------------------

// Reduced process: J_t ~ cut-gamma(theta), then
// eta*_t ~ Bin(U_{t-1} - 1{R=0}, 1 - e^{-J_t/(lambda n)}).
class QuantumReducedStepper {
 public:
  static constexpr bool vertex_consuming = true;

  explicit QuantumReducedStepper(QuantumParams params) : params_(params) { validate(params_); }

  std::uint64_t horizon() const { return params_.n; }
  std::int64_t initial_active() const { return 1; }
  double last_j() const { return last_j_; }

  StepResult step(std::uint64_t t, std::int64_t r_prev, Stream& rng) {
    const std::int64_t u_prev =
        static_cast<std::int64_t>(params_.n) - static_cast<std::int64_t>(t - 1) - r_prev;
    if (u_prev < 0) throw invariant_error("quantum_reduced_step: unseen count negative");
    const std::int64_t m_eff = u_prev - (r_prev == 0 ? 1 : 0);
    if (m_eff < 0) throw invariant_error("quantum_reduced_step: no neutral circle to seed");
    last_j_ = cut_gamma({params_.theta}, rng);
    const double success =
        -std::expm1(-last_j_ / (params_.lambda * static_cast<double>(params_.n)));
    const auto eta = binomial(static_cast<std::uint64_t>(m_eff), success, rng);
    return {static_cast<std::int64_t>(eta), 1};
  }

 private:
  QuantumParams params_;
  double last_j_ = 0.0;
};

struct QuantumDirectResult {
  std::uint64_t cmax = 0;           // in intervals
  std::uint64_t num_components = 0;
  std::uint64_t total_intervals = 0;
};

namespace detail {

inline std::uint64_t poisson_at_least_one(double mu, Stream& rng) {
  const double denom = -std::expm1(-mu);
  const double u = rng.next_unit() * denom;
  double pmf = mu * std::exp(-mu);
  double cum = pmf;
  std::uint64_t k = 1;
  while (u >= cum && k < 500) {
    ++k;
    pmf *= mu / static_cast<double>(k);
    cum += pmf;
  }
  return k;
}

}  // namespace detail

// Direct sampler of the interval graph: per-vertex Poisson(theta) holes with
// uniform positions (zero holes leaves the circle as one interval), pair link
// processes of rate 1/(lambda n) selected by geometric skip over the C(n,2)
// slots, link times joining the containing intervals, union-find over all
// intervals.  With holes disabled the model degenerates to
// G(n, 1 - e^{-theta/(lambda n)}).
inline QuantumDirectResult quantum_direct(const QuantumParams& params, Stream& rng,
                                          bool holes_enabled = true) {
  validate(params);
  const std::uint64_t n = params.n;
  const double theta = params.theta;
  std::vector<std::uint32_t> k(n, 1);
  std::vector<std::uint64_t> base(n + 1, 0);
  std::vector<double> holes;       // flattened, sorted per vertex
  std::vector<std::uint64_t> off(n + 1, 0);
  for (std::uint64_t v = 0; v < n; ++v) {
    std::uint64_t c = holes_enabled ? poisson(theta, rng) : 0;
    std::vector<double> hv(c);
    for (auto& x : hv) x = theta * rng.next_unit();
    std::sort(hv.begin(), hv.end());
    holes.insert(holes.end(), hv.begin(), hv.end());
    off[v + 1] = holes.size();
    k[v] = c > 0 ? static_cast<std::uint32_t>(c) : 1;
    base[v + 1] = base[v] + k[v];
  }
  const std::uint64_t total_intervals = base[n];
  UnionFind uf(total_intervals);

  auto interval_of = [&](std::uint64_t v, double x) -> std::uint64_t {
    const std::uint64_t c = off[v + 1] - off[v];
    if (c == 0) return 0;
    const auto first = holes.begin() + static_cast<std::ptrdiff_t>(off[v]);
    const auto last = holes.begin() + static_cast<std::ptrdiff_t>(off[v + 1]);
    const auto it = std::upper_bound(first, last, x);
    if (it == first) return c - 1;  // before the first hole: wrapping interval
    return static_cast<std::uint64_t>(it - first) - 1;
  };

  const double mu = theta / (params.lambda * static_cast<double>(n));
  const std::uint64_t total_pairs = n * (n - 1) / 2;
  if (total_pairs > 0) {
    const double q = -std::expm1(-mu);
    const double log1mq = std::log1p(-q);
    std::uint64_t row = 0, row_start = 0, idx = 0;
    auto unrank = [&](std::uint64_t s) {
      while (s - row_start >= n - 1 - row) {
        row_start += n - 1 - row;
        ++row;
      }
      return std::pair<std::uint64_t, std::uint64_t>(row, row + 1 + (s - row_start));
    };
    for (;;) {
      const double gap_d = std::floor(std::log(rng.next_unit_open()) / log1mq);
      if (gap_d >= static_cast<double>(total_pairs)) break;
      idx += static_cast<std::uint64_t>(gap_d);
      if (idx >= total_pairs) break;
      const auto [u, v] = unrank(idx);
      const std::uint64_t links = detail::poisson_at_least_one(mu, rng);
      for (std::uint64_t l = 0; l < links; ++l) {
        const double x = theta * rng.next_unit();
        uf.unite(base[u] + interval_of(u, x), base[v] + interval_of(v, x));
      }
      ++idx;
    }
  }

  QuantumDirectResult res;
  res.total_intervals = total_intervals;
  std::vector<std::uint64_t> count(total_intervals, 0);
  for (std::uint64_t i = 0; i < total_intervals; ++i) ++count[uf.find(i)];
  for (std::uint64_t i = 0; i < total_intervals; ++i) {
    if (count[i] > 0) {
      ++res.num_components;
      if (count[i] > res.cmax) res.cmax = count[i];
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// One |C_max| sample per replicate.
// ---------------------------------------------------------------------------

struct CmaxSample {
  std::uint64_t cmax = 0;
  std::uint64_t num_components = 0;
};

inline CmaxSample cmax_sample(const ModelParams& model, Stream& rng) {
  ExploreOptions opt;
  opt.record_sizes = false;  // O(1) memory per replicate
  CmaxSample out;
  if (const auto* er = std::get_if<ErParams>(&model)) {
    ErStepper st(*er);
    const auto trace = run_exploration(st, rng, opt);
    out.cmax = max_component(trace);
    out.num_components = trace.num_components;
  } else if (const auto* reg = std::get_if<RegParams>(&model)) {
    ConfigStepper st(*reg, rng);
    const auto trace = run_exploration(st, rng, opt);
    out.cmax = max_component(trace);
    out.num_components = trace.num_components;
  } else if (const auto* rig = std::get_if<IntersectionParams>(&model)) {
    IntersectionStepper st(*rig);
    const auto trace = run_exploration(st, rng, opt);
    out.cmax = max_component(trace);
    out.num_components = trace.num_components;
  } else {
    const auto& q = std::get<QuantumParams>(model);
    const auto res = quantum_direct(q, rng, true);
    out.cmax = res.cmax;
    out.num_components = res.num_components;
  }
  return out;
}

}  // namespace critlab
