// Deterministic parallel Monte Carlo experiments: replicate-major worker
// pool, theorem-event tail estimation, decay-shape verification, scaling-
// exponent fits, stopping-time instrumentation and CSV/JSON export.
//
// Replicate i always draws from stream_id = base + i, so outputs are
// byte-identical for any worker count.

#pragma once

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "critlab/bounds.hpp"
#include "critlab/io.hpp"
#include "critlab/models.hpp"
#include "critlab/stats.hpp"

namespace critlab {

struct ExperimentConfig {
  ModelParams model;
  std::uint64_t replicates = 1;
  SeedSpec seed;
  std::vector<double> a_grid;
  unsigned threads = 1;
};

struct ReplicateSample {
  std::uint64_t cmax = 0;
  std::uint64_t num_components = 0;
};

// Index-addressed parallel map; work is handed out in chunks but every result
// lands at its own index, so the merge is schedule-independent.
template <class Fn>
void parallel_for_index(std::uint64_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const std::uint64_t chunk = 64;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t start = next.fetch_add(chunk);
      if (start >= count) return;
      const std::uint64_t stop = std::min(start + chunk, count);
      for (std::uint64_t i = start; i < stop; ++i) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          next.store(count);
          return;
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline std::vector<ReplicateSample> run_replicates(const ExperimentConfig& cfg) {
  if (cfg.replicates < 1) throw std::invalid_argument("run_replicates: need replicates >= 1");
  std::vector<ReplicateSample> out(cfg.replicates);
  parallel_for_index(cfg.replicates, cfg.threads, [&](std::uint64_t i) {
    Stream rng(cfg.seed.root_seed, cfg.seed.stream_id + i);
    try {
      const auto s = cmax_sample(cfg.model, rng);
      out[i] = {s.cmax, s.num_components};
    } catch (const std::exception& e) {
      throw invariant_error("replicate " + std::to_string(i) + ": " + e.what());
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Tail estimation against the theorem events.
// ---------------------------------------------------------------------------

enum class TailDirection { lower, upper };

inline std::string direction_name(TailDirection d) {
  return d == TailDirection::lower ? "lower" : "upper";
}

struct TailEstimate {
  std::string model;
  std::uint64_t n = 0;
  double a = 0.0;
  TailDirection direction = TailDirection::lower;
  std::uint64_t threshold = 0;
  std::uint64_t hits = 0;
  std::uint64_t reps = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double theorem_bound = std::numeric_limits<double>::quiet_NaN();
  bool vacuous = true;
  bool pinned_zero = false;  // lower direction with A >= n^{2/3}: empty event
};

inline std::vector<TailEstimate> tail_estimates(const std::vector<ReplicateSample>& samples,
                                                const ModelParams& model,
                                                const std::vector<double>& a_grid,
                                                TailDirection direction) {
  if (samples.empty()) throw std::invalid_argument("tail_estimates: no samples");
  const std::uint64_t n = model_n(model);
  const double n23 = std::cbrt(static_cast<double>(n)) * std::cbrt(static_cast<double>(n));
  std::vector<TailEstimate> out;
  for (const double a : a_grid) {
    if (!(a > 0.0)) throw std::invalid_argument("tail_estimates: A must be positive");
    TailEstimate te;
    te.model = model_name(model);
    te.n = n;
    te.a = a;
    te.direction = direction;
    te.reps = samples.size();
    if (direction == TailDirection::lower) {
      te.threshold = static_cast<std::uint64_t>(std::ceil(n23 / a));
      if (a >= n23) {
        // |C_max| >= 1 by definition: the event is empty
        te.pinned_zero = true;
        te.hits = 0;
      } else {
        for (const auto& s : samples)
          if (static_cast<double>(s.cmax) < n23 / a) ++te.hits;
      }
      if (a > 1.0 && a < n23) {
        const auto bound = lower_tail_bound(model, a);
        te.theorem_bound = bound.value;
        te.vacuous = bound.vacuous || !bound.hypotheses_ok;
      }
    } else {
      const double cutoff = std::floor(a * n23);
      te.threshold = static_cast<std::uint64_t>(cutoff);
      for (const auto& s : samples)
        if (static_cast<double>(s.cmax) > cutoff) ++te.hits;
      const auto bound = upper_tail_bound(model, a);
      te.theorem_bound = bound.value;
      te.vacuous = bound.vacuous || !bound.hypotheses_ok;
    }
    const auto est = wilson(te.hits, te.reps);
    te.p_hat = est.p_hat;
    te.ci_lo = est.ci_lo;
    te.ci_hi = est.ci_hi;
    out.push_back(te);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decay-shape verification: p(A) should fall at least like A^{-gamma}.
// ---------------------------------------------------------------------------

struct DecayPair {
  double a_lo = 0.0;
  double a_hi = 0.0;
  double observed_ratio_lo = 0.0;  // ci_lo(A_hi) / ci_hi(A_lo)
  double target = 0.0;             // (A_hi/A_lo)^{-gamma}
  bool pass = true;
  bool informative = true;  // the lower-A cell saw at least one hit
};

struct DecayReport {
  double gamma = 0.0;
  std::vector<DecayPair> pairs;
  bool pass = true;
  bool conclusive = true;
};

// Consecutive-pair test with CI slack: fails only when even the most
// favourable reading of the two intervals exceeds the target ratio.
inline DecayReport decay_check(std::vector<TailEstimate> estimates, double gamma) {
  DecayReport rep;
  rep.gamma = gamma;
  std::sort(estimates.begin(), estimates.end(),
            [](const TailEstimate& x, const TailEstimate& y) { return x.a < y.a; });
  if (estimates.size() < 2) {
    rep.conclusive = false;
    return rep;
  }
  bool any_informative = false;
  for (std::size_t i = 0; i + 1 < estimates.size(); ++i) {
    const auto& lo = estimates[i];
    const auto& hi = estimates[i + 1];
    DecayPair pair;
    pair.a_lo = lo.a;
    pair.a_hi = hi.a;
    pair.target = std::pow(hi.a / lo.a, -gamma);
    pair.observed_ratio_lo = lo.ci_hi > 0.0 ? hi.ci_lo / lo.ci_hi : 0.0;
    pair.pass = pair.observed_ratio_lo <= pair.target + 1e-12;
    // a zero-hit lower cell gives the ratio no content; a zero-hit upper
    // cell still confirms fast decay against the lower cell's interval
    pair.informative = lo.hits > 0;
    any_informative = any_informative || pair.informative;
    rep.pass = rep.pass && pair.pass;
    rep.pairs.push_back(pair);
  }
  rep.conclusive = any_informative;
  return rep;
}

// ---------------------------------------------------------------------------
// Scaling-exponent fit: slope of log median |C_max| against log n.
// ---------------------------------------------------------------------------

struct ScalingFit {
  std::vector<std::uint64_t> ns;
  std::vector<double> medians;
  std::uint64_t reps = 0;
  double slope = 0.0;
  double stderr_slope = 0.0;
  double intercept = 0.0;
};

inline ScalingFit fit_loglog(const std::vector<std::uint64_t>& ns,
                             const std::vector<double>& medians) {
  if (ns.size() != medians.size() || ns.size() < 4)
    throw std::invalid_argument("fit_loglog: need >= 4 grid points");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(medians[i] > 0.0)) throw std::invalid_argument("fit_loglog: degenerate median");
    xs.push_back(std::log(static_cast<double>(ns[i])));
    ys.push_back(std::log(medians[i]));
  }
  const auto m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  ScalingFit fit;
  fit.ns = ns;
  fit.medians = medians;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.stderr_slope = std::sqrt(ss_res / (m - 2.0) / sxx);
  return fit;
}

inline ScalingFit scaling_exponent(const std::function<ModelParams(std::uint64_t)>& family,
                                   const std::vector<std::uint64_t>& n_grid,
                                   std::uint64_t reps, SeedSpec seed, unsigned threads) {
  std::vector<double> medians;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    ExperimentConfig cfg;
    cfg.model = family(n_grid[i]);
    cfg.replicates = reps;
    cfg.seed = {seed.root_seed, seed.stream_id + i * reps};
    cfg.threads = threads;
    const auto samples = run_replicates(cfg);
    std::vector<std::uint64_t> cmax;
    cmax.reserve(samples.size());
    for (const auto& s : samples) cmax.push_back(s.cmax);
    medians.push_back(median(std::move(cmax)));
  }
  ScalingFit fit = fit_loglog(n_grid, medians);
  fit.reps = reps;
  return fit;
}

// ---------------------------------------------------------------------------
// Stopping-time instrumentation.
// ---------------------------------------------------------------------------

struct StoppingStats {
  Estimate tau_h_capped;       // P(tau_h = N2)
  Estimate reach_then_short;   // P(all excursions < N1, R_{tau_h} >= h)
  Estimate d_exceeds;          // intersection: P(D_{T'} > 3 m p T')
  double tau_h_bound = 0.0;        // Phi-form bound on P(tau_h = N2)
  bool tau_h_window_ok = false;     // its h window: c0+1 <= h <= (sigma2-1)/(6 eps1)
  double short_run_bound = 0.0;     // bound on P(all excursions short, level reached)
  bool short_run_window_ok = false; // its h window: h <= 1/eps3
  std::uint64_t n1 = 0;
  std::uint64_t n2 = 0;
  double h = 0.0;
};

// Empirical frequencies of the stopping events against the optional-stopping
// bound values.  Runs the full exploration when full_excursions is set (the
// all-excursions event needs it); otherwise stops after the tau_h + N1 window.
inline StoppingStats stopping_stats(const ModelParams& model, const BoundSpec& spec,
                                    std::uint64_t reps, SeedSpec seed, unsigned threads,
                                    bool full_excursions = true) {
  StoppingStats out;
  out.h = spec.h;
  out.n2 = spec.T_prime;
  out.n1 = spec.T;
  double p_tau1 = 0.0, p_tau2 = 0.0;
  if (const auto* reg = std::get_if<RegParams>(&model)) out.n1 = (reg->d - 1) * spec.T;
  const auto* rig = std::get_if<IntersectionParams>(&model);
  double d_cap = 0.0;
  if (rig != nullptr) {
    const double mp = static_cast<double>(rig->m) * rig->p;
    d_cap = 3.0 * mp * static_cast<double>(spec.T_prime);
    p_tau1 = chernoff_binomial(rig->m * spec.T_prime, rig->p,
                               2.0 * mp * static_cast<double>(spec.T_prime));
    const double drift = mp * static_cast<double>(spec.T_prime + out.n1);
    p_tau2 = d_cap - drift > 0.0
                 ? chernoff_binomial(rig->m * (spec.T_prime + out.n1), rig->p, d_cap - drift)
                 : 1.0;
  }

  std::vector<std::uint8_t> ev_capped(reps, 0), ev_reach_short(reps, 0), ev_d(reps, 0);
  parallel_for_index(reps, threads, [&](std::uint64_t i) {
    Stream rng(seed.root_seed, seed.stream_id + i);
    const double h = spec.h;
    const std::uint64_t n1 = out.n1, n2 = out.n2;
    bool tau_h_set = false, reached = false, all_short = true;
    std::uint64_t tau_h = 0, last_zero = 0, d_at_tp = 0;
    const std::uint64_t stop_at = full_excursions ? 0 : n2 + n1 + 1;
    auto observe = [&](std::uint64_t t, std::int64_t, std::int64_t r, std::uint64_t d_now) {
      if (!tau_h_set) {
        if (static_cast<double>(r) >= h) {
          tau_h = t;
          reached = true;
          tau_h_set = true;
        } else if (t >= n2) {
          tau_h = n2;  // capped; reached stays false
          tau_h_set = true;
        }
      }
      if (r == 0) {
        if (t - last_zero >= n1) all_short = false;
        last_zero = t;
      }
      if (t == n2) d_at_tp = d_now;
      if (stop_at != 0 && t >= stop_at) return false;
      return true;
    };
    ExploreOptions opt;
    opt.record_sizes = false;
    if (const auto* er = std::get_if<ErParams>(&model)) {
      ErStepper st(*er);
      run_exploration(st, rng, opt, [&](std::uint64_t t, std::int64_t eta, std::int64_t r) {
        return observe(t, eta, r, 0);
      });
    } else if (const auto* reg = std::get_if<RegParams>(&model)) {
      ConfigStepper st(*reg, rng);
      run_exploration(st, rng, opt, [&](std::uint64_t t, std::int64_t eta, std::int64_t r) {
        return observe(t, eta, r, 0);
      });
    } else if (rig != nullptr) {
      IntersectionStepper st(*rig);
      run_exploration(st, rng, opt, [&](std::uint64_t t, std::int64_t eta, std::int64_t r) {
        return observe(t, eta, r, st.discovered());
      });
    } else {
      QuantumReducedStepper st(std::get<QuantumParams>(model));
      run_exploration(st, rng, opt, [&](std::uint64_t t, std::int64_t eta, std::int64_t r) {
        return observe(t, eta, r, 0);
      });
    }
    ev_capped[i] = (tau_h_set && tau_h == n2) ? 1 : 0;
    ev_reach_short[i] = (reached && all_short) ? 1 : 0;
    ev_d[i] = (rig != nullptr && static_cast<double>(d_at_tp) > d_cap) ? 1 : 0;
  });

  const auto count = [&](const std::vector<std::uint8_t>& v) {
    std::uint64_t c = 0;
    for (const auto x : v) c += x;
    return c;
  };
  out.tau_h_capped = wilson(count(ev_capped), reps);
  out.reach_then_short = wilson(count(ev_reach_short), reps);
  out.d_exceeds = wilson(count(ev_d), reps);
  out.tau_h_bound = phi(out.n1, out.n2, spec.h, spec.sigma2, spec.z, p_tau1);
  out.tau_h_window_ok =
      spec.c0 + 1.0 <= spec.h && spec.h <= (spec.sigma2 - 1.0) / (6.0 * spec.eps1);
  const double ph = out.tau_h_bound;
  out.short_run_bound = (spec.c1 + 3.0) * static_cast<double>(out.n1) / (spec.h * spec.h) +
                     (ph < 1.0 ? p_tau2 / (1.0 - ph) : 1.0);
  out.short_run_window_ok = spec.h <= 1.0 / spec.eps3;
  return out;
}

// ---------------------------------------------------------------------------
// Export: CSV schemas with mandatory headers, and JSON mirrors.
// ---------------------------------------------------------------------------

inline void write_samples_csv(std::ostream& os, const std::vector<ReplicateSample>& samples) {
  os << "replicate,cmax,num_components\n";
  for (std::size_t i = 0; i < samples.size(); ++i)
    os << i << ',' << samples[i].cmax << ',' << samples[i].num_components << '\n';
}

inline void write_samples_json(std::ostream& os, const std::vector<ReplicateSample>& samples) {
  nlohmann::ordered_json root = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < samples.size(); ++i)
    root.push_back({{"replicate", i},
                    {"cmax", samples[i].cmax},
                    {"num_components", samples[i].num_components}});
  os << root.dump(2) << '\n';
}

inline void write_tails_csv(std::ostream& os, const std::vector<TailEstimate>& tails) {
  os << "model,n,A,direction,threshold,hits,reps,p_hat,ci_lo,ci_hi,theorem_bound,vacuous\n";
  for (const auto& t : tails) {
    os << t.model << ',' << t.n << ',' << fmt_double(t.a) << ',' << direction_name(t.direction)
       << ',' << t.threshold << ',' << t.hits << ',' << t.reps << ',' << fmt_double(t.p_hat)
       << ',' << fmt_double(t.ci_lo) << ',' << fmt_double(t.ci_hi) << ','
       << fmt_double(t.theorem_bound) << ',' << (t.vacuous ? 1 : 0) << '\n';
  }
}

inline void write_tails_json(std::ostream& os, const std::vector<TailEstimate>& tails) {
  nlohmann::ordered_json root = nlohmann::ordered_json::array();
  for (const auto& t : tails) {
    nlohmann::ordered_json row{{"model", t.model},
                               {"n", t.n},
                               {"A", t.a},
                               {"direction", direction_name(t.direction)},
                               {"threshold", t.threshold},
                               {"hits", t.hits},
                               {"reps", t.reps},
                               {"p_hat", t.p_hat},
                               {"ci_lo", t.ci_lo},
                               {"ci_hi", t.ci_hi},
                               {"vacuous", t.vacuous}};
    if (std::isfinite(t.theorem_bound)) row["theorem_bound"] = t.theorem_bound;
    root.push_back(std::move(row));
  }
  os << root.dump(2) << '\n';
}

inline void write_scaling_csv(std::ostream& os, const ScalingFit& fit) {
  os << "n,median_cmax,reps\n";
  for (std::size_t i = 0; i < fit.ns.size(); ++i)
    os << fit.ns[i] << ',' << fmt_double(fit.medians[i]) << ',' << fit.reps << '\n';
}

inline void write_scaling_json(std::ostream& os, const ScalingFit& fit) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < fit.ns.size(); ++i)
    rows.push_back({{"n", fit.ns[i]}, {"median_cmax", fit.medians[i]}, {"reps", fit.reps}});
  nlohmann::ordered_json root{{"rows", std::move(rows)},
                              {"slope", fit.slope},
                              {"stderr", fit.stderr_slope},
                              {"intercept", fit.intercept}};
  os << root.dump(2) << '\n';
}

}  // namespace critlab
