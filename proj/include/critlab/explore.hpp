// Model-agnostic excursion engine.  A stepper yields eta_t given the current
// state and owns its auxiliary bookkeeping; the engine maintains the recursion
//   R_t = R_{t-1} + eta_t - 1   (R_{t-1} >= 1)
//   R_t = eta_t                 (R_{t-1} = 0)
// segments excursions at the zeros of R, and accumulates per-excursion vertex
// counts supplied by the stepper.

#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "critlab/common.hpp"
#include "critlab/rng.hpp"

namespace critlab {

struct StepResult {
  std::int64_t eta = 0;
  std::uint32_t vertices = 0;  // vertices credited to the open component this step
};

struct StoppingObservation {
  std::uint64_t tau_h = 0;
  std::uint64_t tau_0 = 0;
  bool reached_h = false;
  double h = 0.0;
  std::uint64_t n1 = 0;
  std::uint64_t n2 = 0;
};

struct Excursion {
  std::uint64_t start = 0;  // excursion covers steps (start, end]
  std::uint64_t end = 0;
  std::uint64_t length = 0;
  bool finished = true;
};

struct ExcursionTrace {
  std::vector<std::int64_t> etas;              // full mode only
  std::vector<std::int64_t> rs;                // full mode only; rs[0] = R_0
  std::vector<std::uint64_t> boundaries;       // the t_i
  std::vector<std::uint64_t> component_sizes;  // vertex counts per closed excursion
  std::vector<std::uint64_t> excursion_lengths;
  std::uint64_t total_steps = 0;
  std::uint64_t max_size = 0;
  std::uint64_t num_components = 0;
  bool finished = true;
  std::uint64_t open_vertices = 0;  // unfinished trailing excursion, if any
  std::uint64_t open_length = 0;
};

struct ExploreOptions {
  bool record_path = false;
  bool record_sizes = true;
  std::uint64_t max_steps = 0;  // 0: run the stepper's full horizon
};

namespace detail {

template <class Stepper>
std::uint64_t untracked_singletons_of(const Stepper& st) {
  if constexpr (requires { st.untracked_singletons(); })
    return st.untracked_singletons();
  else
    return 0;
}

}  // namespace detail

// on_step(t, eta, R_t) -> bool; returning false stops the run early.
template <class Stepper, class OnStep>
ExcursionTrace run_exploration(Stepper& stepper, Stream& rng, const ExploreOptions& opt,
                               OnStep&& on_step) {
  ExcursionTrace trace;
  std::int64_t r = stepper.initial_active();
  if (r < 0) throw invariant_error("run_exploration: negative initial active count");
  std::uint64_t horizon = stepper.horizon();
  if (opt.max_steps != 0 && opt.max_steps < horizon) horizon = opt.max_steps;
  if (horizon == 0) throw std::invalid_argument("run_exploration: horizon must be >= 1");

  if (opt.record_path) {
    trace.etas.reserve(horizon);
    trace.rs.reserve(horizon + 1);
    trace.rs.push_back(r);
  }

  std::uint64_t last_boundary = 0;
  std::uint64_t open_vertices = 0;
  bool stopped_early = false;

  std::uint64_t t = 0;
  while (t < horizon) {
    ++t;
    const StepResult sr = stepper.step(t, r, rng);
    if (Stepper::vertex_consuming && sr.eta < 0)
      throw invariant_error("run_exploration: negative eta from a vertex-consuming model");
    const std::int64_t r_new = (r >= 1) ? r + sr.eta - 1 : sr.eta;
    if (r_new < 0) throw invariant_error("run_exploration: active count went negative");
    open_vertices += sr.vertices;
    if (r_new == 0) {
      const std::uint64_t length = t - last_boundary;
      if (opt.record_sizes) {
        trace.boundaries.push_back(t);
        trace.component_sizes.push_back(open_vertices);
        trace.excursion_lengths.push_back(length);
      }
      if (open_vertices > trace.max_size) trace.max_size = open_vertices;
      ++trace.num_components;
      last_boundary = t;
      open_vertices = 0;
    }
    r = r_new;
    if (opt.record_path) {
      trace.etas.push_back(sr.eta);
      trace.rs.push_back(r);
    }
    if (!on_step(t, sr.eta, r)) {
      stopped_early = true;
      break;
    }
  }

  trace.total_steps = t;
  if (r > 0 || (stopped_early && t < stepper.horizon())) {
    trace.finished = false;
    trace.open_vertices = open_vertices;
    trace.open_length = t - last_boundary;
  }
  const std::uint64_t untracked = detail::untracked_singletons_of(stepper);
  if (untracked > 0) {
    trace.num_components += untracked;
    if (trace.max_size < 1) trace.max_size = 1;
  }
  return trace;
}

template <class Stepper>
ExcursionTrace run_exploration(Stepper& stepper, Stream& rng,
                               const ExploreOptions& opt = {}) {
  return run_exploration(stepper, rng, opt,
                         [](std::uint64_t, std::int64_t, std::int64_t) { return true; });
}

// Maximal intervals on which R is positive, from a recorded path rs[0..K]
// with rs[0] = R_0.  The step returning to zero belongs to the excursion.
inline std::vector<Excursion> segment_excursions(const std::vector<std::int64_t>& rs) {
  if (rs.empty()) throw std::invalid_argument("segment_excursions: empty path");
  std::vector<Excursion> out;
  std::uint64_t last_zero = 0;
  bool open = rs[0] > 0;
  for (std::size_t t = 1; t < rs.size(); ++t) {
    if (rs[t] == 0) {
      out.push_back({last_zero, t, t - last_zero, true});
      last_zero = t;
      open = false;
    } else {
      open = true;
    }
  }
  if (open) {
    const std::uint64_t end = rs.size() - 1;
    out.push_back({last_zero, end, end - last_zero, false});
  }
  return out;
}

// tau_h = min(first t >= 1 with R_t >= h, N2); tau_0 = min(first s >= 1 with
// R_{tau_h + s} = 0, N1).  h may be +infinity.
inline StoppingObservation observe_stopping(const std::vector<std::int64_t>& rs, double h,
                                            std::uint64_t n1, std::uint64_t n2) {
  if (rs.empty()) throw std::invalid_argument("observe_stopping: empty path");
  if (n1 > n2 || n2 > rs.size() - 1)
    throw std::invalid_argument("observe_stopping: need N1 <= N2 <= path length");
  StoppingObservation obs;
  obs.h = h;
  obs.n1 = n1;
  obs.n2 = n2;
  obs.tau_h = n2;
  for (std::uint64_t t = 1; t <= n2; ++t) {
    if (static_cast<double>(rs[t]) >= h) {
      obs.tau_h = t;
      break;
    }
  }
  obs.reached_h = static_cast<double>(rs[obs.tau_h]) >= h;
  obs.tau_0 = n1;
  for (std::uint64_t s = 1; s <= n1 && obs.tau_h + s < rs.size(); ++s) {
    if (rs[obs.tau_h + s] == 0) {
      obs.tau_0 = s;
      break;
    }
  }
  return obs;
}

// Largest closed component in the trace.  An unfinished trailing excursion is
// an error unless the caller opts into the lower-bound reading.
inline std::uint64_t max_component(const ExcursionTrace& trace, bool lower_bound_ok = false) {
  if (!trace.finished && !lower_bound_ok)
    throw invariant_error("max_component: trace has an unfinished excursion");
  std::uint64_t m = trace.max_size;
  if (!trace.finished && trace.open_vertices > m) m = trace.open_vertices;
  return m;
}

}  // namespace critlab
