// Theorem and lemma machinery: the (H.1)/(H.2) parameter tables per model,
// the optional-stopping excursion bound, exact conditional step moments and
// their deterministic grid checkers, the Chernoff evaluator, upper-tail
// constants from dominating increment laws, and the quantum upper-tail
// decomposition.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "critlab/critical_curve.hpp"
#include "critlab/models.hpp"
#include "critlab/walks.hpp"

namespace critlab {

enum class ModelKind { er, regular, intersection, quantum };

inline ModelKind kind_of(const ModelParams& m) {
  if (std::holds_alternative<ErParams>(m)) return ModelKind::er;
  if (std::holds_alternative<RegParams>(m)) return ModelKind::regular;
  if (std::holds_alternative<IntersectionParams>(m)) return ModelKind::intersection;
  return ModelKind::quantum;
}

inline std::string kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::er: return "er";
    case ModelKind::regular: return "regular";
    case ModelKind::intersection: return "intersection";
    default: return "quantum";
  }
}

// The constants instantiating (H.1)/(H.2) for one model at one (n, A).
struct BoundSpec {
  ModelKind model = ModelKind::er;
  double c0 = 0.0;
  double sigma2 = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double c1 = 0.0;
  double eps3 = 0.0;
  double h = 0.0;
  std::uint64_t T = 0;
  std::uint64_t T_prime = 0;
  double z = 1.0;

  double h_window_lo() const { return std::max(c0, 1.0); }
  double h_window_hi() const {
    return std::min((sigma2 - 1.0) / (6.0 * eps1), 1.0 / eps3);
  }

  // Hypothesis violations are reported, never silently clamped.
  std::vector<std::string> hypothesis_violations() const {
    std::vector<std::string> out;
    if (!(sigma2 > 1.0 + 3.0 * eps2)) out.push_back("sigma2 <= 1 + 3*eps2");
    for (const auto& [name, eps] :
         {std::pair{"eps1", eps1}, std::pair{"eps2", eps2}, std::pair{"eps3", eps3}})
      if (!(eps > 0.0 && eps < 1.0)) out.push_back(std::string(name) + " outside (0,1)");
    if (h < h_window_lo()) out.push_back("h below c0 v 1");
    if (h > h_window_hi()) out.push_back("h above ((sigma2-1)/6eps1) ^ (1/eps3)");
    return out;
  }
  bool hypotheses_ok() const { return hypothesis_violations().empty(); }
};

// Phi(N1, N2, h, sigma2, z) = 3 (sigma2-1)^{-1} (2h^2 - z^2) / N2 + P(tau1 <= N2).
inline double phi(std::uint64_t n1, std::uint64_t n2, double h, double sigma2, double z,
                  double p_tau1) {
  if (!(sigma2 > 1.0)) throw std::invalid_argument("phi: need sigma2 > 1");
  if (n1 < 1 || n2 < n1) throw std::invalid_argument("phi: need N2 >= N1 >= 1");
  if (!(p_tau1 >= 0.0 && p_tau1 <= 1.0)) throw std::invalid_argument("phi: bad p_tau1");
  return 3.0 / (sigma2 - 1.0) / static_cast<double>(n2) * (2.0 * h * h - z * z) + p_tau1;
}

struct ExcursionBound {
  double value = std::numeric_limits<double>::infinity();
  double phi = 0.0;
  bool vacuous = true;  // value >= 1 (or Phi >= 1, which poisons the last term)
};

// Upper bound on P(all excursions last < N1 steps):
//   Phi + (c1+3) N1 / h^2 + P(tau2 <= N1) / (1 - Phi).
inline ExcursionBound jointprop_bound(const BoundSpec& spec, double p_tau1, double p_tau2,
                                      std::uint64_t n1_override = 0) {
  const std::uint64_t n1 = n1_override != 0 ? n1_override : spec.T;
  ExcursionBound out;
  out.phi = phi(n1, spec.T_prime, spec.h, spec.sigma2, spec.z, p_tau1);
  if (out.phi >= 1.0) return out;  // vacuous, value stays infinite
  out.value = out.phi + (spec.c1 + 3.0) * static_cast<double>(n1) / (spec.h * spec.h) +
              p_tau2 / (1.0 - out.phi);
  out.vacuous = !(out.value < 1.0);
  return out;
}

// ---------------------------------------------------------------------------
// Exact conditional step moments.
// ---------------------------------------------------------------------------

struct Moments {
  double mean = 0.0;
  double second = 0.0;
};

inline Moments er_conditional_moments(std::uint64_t n, double p, std::uint64_t t,
                                      std::uint64_t r) {
  if (t < 1) throw std::invalid_argument("er_conditional_moments: t must be >= 1");
  const std::int64_t u =
      static_cast<std::int64_t>(n) - static_cast<std::int64_t>(t - 1) - static_cast<std::int64_t>(r);
  if (u < 0) throw std::invalid_argument("er_conditional_moments: U < 0");
  const double m = std::max<std::int64_t>(u - (r == 0 ? 1 : 0), 0);
  Moments out;
  out.mean = m * p;
  out.second = m * p * (1.0 - p) + (m * p) * (m * p);
  return out;
}

inline Moments intersection_conditional_moments(std::uint64_t n, std::uint64_t m, double p,
                                                std::uint64_t t, std::uint64_t r,
                                                std::uint64_t d_discovered) {
  if (d_discovered > m)
    throw std::invalid_argument("intersection_conditional_moments: D > m");
  const std::int64_t u =
      static_cast<std::int64_t>(n) - static_cast<std::int64_t>(t - 1) - static_cast<std::int64_t>(r);
  if (u < 0) throw std::invalid_argument("intersection_conditional_moments: U < 0");
  const double mm = std::max<std::int64_t>(u - (r == 0 ? 1 : 0), 0);
  const double rem = static_cast<double>(m - d_discovered);
  double e_s = 0.0, e_s2 = 0.0;
  if (rem > 0.0 && p > 0.0) {
    // E[(1-p)^N] and E[(1-p)^{2N}] for N ~ Bin(m - D, p), via the pgf
    const double pow1 = p >= 1.0 ? 0.0 : std::exp(rem * std::log1p(-p * p));
    const double base2 = 1.0 - 2.0 * p * p + p * p * p;  // 1 - p + p(1-p)^2
    const double pow2 = base2 <= 0.0 ? 0.0 : std::exp(rem * std::log(base2));
    e_s = 1.0 - pow1;                  // E[1-(1-p)^N]
    e_s2 = 1.0 - 2.0 * pow1 + pow2;    // E[(1-(1-p)^N)^2]
  }
  Moments out;
  out.mean = mm * e_s;
  out.second = mm * e_s + mm * (mm - 1.0) * e_s2;
  return out;
}

// E[e^{-sJ}] for J ~ cut-gamma on a circle of length theta.
inline double cut_gamma_laplace(double theta, double s) {
  const double a = 1.0 + s;
  return (1.0 - std::exp(-a * theta) * (1.0 + a * theta)) / (a * a) +
         std::exp(-s * theta) * std::exp(-theta) * (1.0 + theta);
}

inline Moments quantum_conditional_moments(std::uint64_t n, double theta, double lambda,
                                           std::uint64_t t, std::uint64_t r) {
  if (!(theta > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("quantum_conditional_moments: bad parameters");
  const std::int64_t u =
      static_cast<std::int64_t>(n) - static_cast<std::int64_t>(t - 1) - static_cast<std::int64_t>(r);
  if (u < 0) throw std::invalid_argument("quantum_conditional_moments: U < 0");
  const double mm = std::max<std::int64_t>(u - (r == 0 ? 1 : 0), 0);
  const double s = 1.0 / (lambda * static_cast<double>(n));
  const double psi1 = cut_gamma_laplace(theta, s);
  const double psi2 = cut_gamma_laplace(theta, 2.0 * s);
  const double e_q = 1.0 - psi1;
  const double e_q2 = 1.0 - 2.0 * psi1 + psi2;
  Moments out;
  out.mean = mm * e_q;
  out.second = mm * e_q + mm * (mm - 1.0) * e_q2;
  return out;
}

// ---------------------------------------------------------------------------
// Per-model (H.1)/(H.2) tables.
// ---------------------------------------------------------------------------

namespace detail {

struct GridDeviation {
  double min_mean_h1 = 1.0;
  double min_second_h1 = std::numeric_limits<double>::infinity();
  double max_second = 0.0;
  double min_mean_h2 = 1.0;
};

template <class MomentsFn>
GridDeviation scan_grid(MomentsFn&& moments, std::uint64_t t_h1, std::uint64_t t_h2,
                        std::uint64_t r_cap) {
  GridDeviation dev;
  // mean and second moment are monotone decreasing in t and in R, so the
  // extremes sit on the grid corners; scan them anyway, it is cheap
  for (const std::uint64_t t : {std::uint64_t{1}, t_h1, t_h2}) {
    for (const std::uint64_t r : {std::uint64_t{0}, std::uint64_t{1}, r_cap}) {
      if (t == 1 && r == 0) continue;
      const Moments mo = moments(t, r);
      dev.max_second = std::max(dev.max_second, mo.second);
      if (t <= t_h1) {
        dev.min_mean_h1 = std::min(dev.min_mean_h1, mo.mean);
        dev.min_second_h1 = std::min(dev.min_second_h1, mo.second);
      }
      dev.min_mean_h2 = std::min(dev.min_mean_h2, mo.mean);
    }
  }
  return dev;
}

}  // namespace detail

// The (H.1)/(H.2) table for the lower-tail theorem at level A: T, T', h and
// all constants.  ER and regular use the published tables (with the ER
// epsilon_3 as 8T'/n: the model has no d); intersection and quantum compute
// their epsilons from the exact conditional-moment closed forms, worst case
// over the admissible state grid, with a safety factor of 2.  All fields are
// plain data and may be overridden by the caller.
inline BoundSpec lower_tail_spec(const ModelParams& model, double A) {
  const std::uint64_t n = model_n(model);
  const double n23 = std::cbrt(static_cast<double>(n)) * std::cbrt(static_cast<double>(n));
  if (!(A > 1.0) || !(A < n23))
    throw std::invalid_argument("lower_tail_spec: need 1 < A < n^{2/3} (the event is empty otherwise)");
  BoundSpec spec;
  spec.model = kind_of(model);
  spec.T = static_cast<std::uint64_t>(std::ceil(n23 / A));
  spec.T_prime = static_cast<std::uint64_t>(std::ceil(n23));
  const double tp_over_n = static_cast<double>(spec.T_prime) / static_cast<double>(n);
  const double n13 = std::cbrt(static_cast<double>(n));
  const double a14 = std::pow(A, 0.25);

  if (const auto* er = std::get_if<ErParams>(&model)) {
    (void)er;
    spec.c0 = 2.0;
    spec.sigma2 = 2.0;
    spec.eps1 = 4.0 * tp_over_n;
    spec.eps2 = 5.0 * tp_over_n;
    spec.c1 = 2.0;
    spec.eps3 = 8.0 * tp_over_n;
    spec.h = n13 / (24.0 * a14);
    spec.z = 1.0;
    return spec;
  }
  if (const auto* reg = std::get_if<RegParams>(&model)) {
    const double d = reg->d;
    spec.c0 = 4.0 * (d - 1.0) * (d - 1.0);
    spec.sigma2 = d - 1.0;
    spec.eps1 = 12.0 * d * tp_over_n;
    spec.eps2 = 24.0 * d * tp_over_n;
    spec.c1 = spec.c0;
    spec.eps3 = 24.0 * d * tp_over_n;
    spec.h = n13 / (24.0 * d * a14);
    spec.z = d;
    return spec;
  }

  const std::uint64_t r_cap = static_cast<std::uint64_t>(std::ceil(n13));
  const std::uint64_t t_h2 = std::min<std::uint64_t>(spec.T_prime + spec.T, n);
  detail::GridDeviation dev;
  if (const auto* rig = std::get_if<IntersectionParams>(&model)) {
    // moments are decreasing in D, so the minima sit at D = D_max and the
    // second-moment cap at D = 0, t = 1, R = 1 (largest unseen count)
    const std::uint64_t d_max = std::min<std::uint64_t>(
        static_cast<std::uint64_t>(std::floor(3.0 * static_cast<double>(rig->m) * rig->p *
                                              static_cast<double>(spec.T_prime))),
        rig->m);
    dev = detail::scan_grid(
        [&](std::uint64_t t, std::uint64_t r) {
          const std::uint64_t rr = std::min<std::uint64_t>(r, rig->n - std::min(rig->n, t - 1));
          return intersection_conditional_moments(rig->n, rig->m, rig->p, t, rr, d_max);
        },
        spec.T_prime, t_h2, r_cap);
    const auto top = intersection_conditional_moments(rig->n, rig->m, rig->p, 1, 1, 0);
    dev.max_second = std::max(dev.max_second, top.second);
  } else {
    const auto& q = std::get<QuantumParams>(model);
    dev = detail::scan_grid(
        [&](std::uint64_t t, std::uint64_t r) {
          const std::uint64_t rr = std::min<std::uint64_t>(r, q.n - std::min(q.n, t - 1));
          return quantum_conditional_moments(q.n, q.theta, q.lambda, t, rr);
        },
        spec.T_prime, t_h2, r_cap);
  }

  spec.sigma2 = 2.0;
  spec.c0 = 2.0 + 2.0 * std::max(0.0, dev.max_second - 2.0);
  spec.c1 = spec.c0;
  spec.eps1 = std::max(2.0 * (1.0 - dev.min_mean_h1), 1e-12);
  spec.eps2 = std::max(2.0 * (2.0 - dev.min_second_h1), 1e-12);
  spec.eps3 = std::max(2.0 * (1.0 - dev.min_mean_h2), 1e-12);
  const double c2 = spec.eps1 / tp_over_n;
  const double c4 = spec.eps3 / tp_over_n;
  const double h_const = std::max({24.0, 6.0 * c2 / (spec.sigma2 - 1.0), c4});
  spec.h = n13 / (h_const * a14);
  spec.z = 1.0;
  return spec;
}

// ---------------------------------------------------------------------------
// Deterministic condition checkers.
// ---------------------------------------------------------------------------

struct ConditionViolation {
  std::uint64_t t = 0;
  std::uint64_t r = 0;
  std::string quantity;
  double value = 0.0;
  double bound = 0.0;
};

struct ConditionReport {
  ModelKind model = ModelKind::er;
  std::string grid;
  std::uint64_t states_checked = 0;
  std::vector<ConditionViolation> violations;
  bool pass = true;

  void record(std::uint64_t t, std::uint64_t r, const char* what, double value, double bound) {
    pass = false;
    if (violations.size() < 200) violations.push_back({t, r, what, value, bound});
  }
};

// Verifies the (H.1)/(H.2) moment inequalities state by state over
// t in [1, T'] (and [2, T'+N1] for (H.2)), R in [0, ceil(h)], using exact
// conditional moments; the regular model instead checks the coupled
// lower-bound chain with worst-case stub counts.
inline ConditionReport check_conditions(const ModelParams& model, const BoundSpec& spec) {
  ConditionReport rep;
  rep.model = kind_of(model);
  const std::uint64_t n = model_n(model);
  const std::uint64_t r_cap = static_cast<std::uint64_t>(std::ceil(spec.h));
  const std::uint64_t t_h2 = std::min<std::uint64_t>(spec.T_prime + spec.T, n);
  rep.grid = "t in [1," + std::to_string(t_h2) + "], R in [0," + std::to_string(r_cap) + "]";

  if (rep.model == ModelKind::regular) {
    const auto& reg = std::get<RegParams>(model);
    const double d = reg.d;
    const double p = reg.p;
    // unconditional second-moment cap: eta <= (d-1) + (d-1)Ber(p) stubs
    const double m2_ub = (d - 1.0) * (d - 1.0) * (1.0 + 3.0 * p);
    if (m2_ub > spec.c0) rep.record(0, 0, "E[eta^2] <= c0", m2_ub, spec.c0);
    if ((d - 1.0) * p > 1.0) rep.record(0, 0, "E[eta|R] <= 1", (d - 1.0) * p, 1.0);
    for (std::uint64_t t = 1; t <= t_h2; ++t) {
      const double unmatched = d * static_cast<double>(n) - 2.0 * static_cast<double>(t - 1) - 1.0;
      const double r_max =
          std::min(static_cast<double>(r_cap), d + 2.0 * (d - 1.0) * static_cast<double>(t - 1));
      const double ex1 = p * (d - 1.0) * (d - 1.0) * 2.0 * static_cast<double>(t) / unmatched;
      const double ex2 = (d - 1.0) * r_max * (p * (d - 1.0) + 1.0) / unmatched;
      const double mean_lb = 1.0 - ex1 - ex2;
      const double m2_lb = (d - 1.0) - 2.0 * p * (d - 1.0) * (ex1 + ex2);
      ++rep.states_checked;
      if (t <= spec.T_prime) {
        if (mean_lb < 1.0 - spec.eps1) rep.record(t, 0, "E[eta|R] >= 1-eps1", mean_lb, 1.0 - spec.eps1);
        if (m2_lb < spec.sigma2 - spec.eps2)
          rep.record(t, 0, "E[eta^2|R] >= sigma2-eps2", m2_lb, spec.sigma2 - spec.eps2);
      }
      if (mean_lb < 1.0 - spec.eps3) rep.record(t, 0, "E[eta|R] >= 1-eps3", mean_lb, 1.0 - spec.eps3);
    }
    return rep;
  }

  const auto moments_of = [&](std::uint64_t t, std::uint64_t r,
                              std::uint64_t d_disc) -> Moments {
    if (const auto* er = std::get_if<ErParams>(&model))
      return er_conditional_moments(er->n, er->p, t, r);
    if (const auto* rig = std::get_if<IntersectionParams>(&model))
      return intersection_conditional_moments(rig->n, rig->m, rig->p, t, r, d_disc);
    const auto& q = std::get<QuantumParams>(model);
    return quantum_conditional_moments(q.n, q.theta, q.lambda, t, r);
  };

  std::vector<std::uint64_t> d_grid = {0};
  if (const auto* rig = std::get_if<IntersectionParams>(&model)) {
    const auto d_max = static_cast<std::uint64_t>(
        std::floor(3.0 * static_cast<double>(rig->m) * rig->p * static_cast<double>(spec.T_prime)));
    d_grid.push_back(std::min(d_max, rig->m));
  }

  for (std::uint64_t t = 1; t <= t_h2; ++t) {
    for (std::uint64_t r = 0; r <= r_cap; ++r) {
      if (t == 1 && r == 0) continue;  // exploration starts with R_0 >= 1
      if (t - 1 + r > n) continue;     // unreachable state
      for (const auto d_disc : d_grid) {
        const Moments mo = moments_of(t, r, d_disc);
        ++rep.states_checked;
        if (t <= spec.T_prime) {
          if (mo.second > spec.c0) rep.record(t, r, "E[eta^2|R] <= c0", mo.second, spec.c0);
          if (r >= 1 && mo.mean > 1.0) rep.record(t, r, "E[eta|R] <= 1", mo.mean, 1.0);
          if (mo.mean < 1.0 - spec.eps1)
            rep.record(t, r, "E[eta|R] >= 1-eps1", mo.mean, 1.0 - spec.eps1);
          if (mo.second < spec.sigma2 - spec.eps2)
            rep.record(t, r, "E[eta^2|R] >= sigma2-eps2", mo.second, spec.sigma2 - spec.eps2);
        }
        if (t >= 2) {
          if (mo.second > spec.c1) rep.record(t, r, "E[eta^2|.] <= c1", mo.second, spec.c1);
          if (static_cast<double>(r) < spec.h && mo.mean < 1.0 - spec.eps3)
            rep.record(t, r, "E[eta|.] >= 1-eps3", mo.mean, 1.0 - spec.eps3);
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Chernoff bound and upper-tail constants.
// ---------------------------------------------------------------------------

// P(Bin(N,q) >= Nq + x) <= exp(-x^2 / (2Nq + 2x/3)).
inline double chernoff_binomial(std::uint64_t n, double q, double x) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("chernoff_binomial: bad q");
  if (!(x > 0.0)) throw std::invalid_argument("chernoff_binomial: need x > 0");
  const double nq = static_cast<double>(n) * q;
  return std::exp(-x * x / (2.0 * nq + 2.0 * x / 3.0));
}

struct UpperTailConstant {
  double c_star = 0.0;         // c0 * P(X = r+1)^{-1} (1 + 2 Var[X])
  double paper_printed = std::numeric_limits<double>::quiet_NaN();
  double prob_r_plus_1 = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double prefactor_c0 = 1.0;
};

// Dominating increment laws for the walk comparison.
inline IncrementLaw er_dominating_law(std::uint64_t n) {
  return IncrementLaw::binomial(n, 1.0 / static_cast<double>(n));
}

inline IncrementLaw regular_dominating_law(std::uint32_t d) {
  if (d == 3) return IncrementLaw::binomial_rational(2, 1, 2);
  return IncrementLaw::binomial(d - 1, 1.0 / (d - 1.0));
}

inline UpperTailConstant upper_tail_constant(const ModelParams& model) {
  UpperTailConstant out;
  if (const auto* er = std::get_if<ErParams>(&model)) {
    const double n = static_cast<double>(er->n);
    const double p = er->p;
    out.prefactor_c0 = 1.0;
    out.mean = n * p;
    out.variance = n * p * (1.0 - p);
    out.prob_r_plus_1 =
        std::exp(log_factorial(er->n) - log_factorial(2) - log_factorial(er->n - 2) +
                 2.0 * std::log(p) + (n - 2.0) * std::log1p(-p));
    out.paper_printed = 10.0 * std::exp(1.0);
  } else if (const auto* reg = std::get_if<RegParams>(&model)) {
    if (reg->d < 3) throw std::invalid_argument("upper_tail_constant: d must be >= 3");
    const double d = reg->d;
    const double p = reg->p;
    out.prefactor_c0 = 1.0 / ((d - 2.0) * p * std::pow(1.0 - p, d - 3.0));
    out.mean = (d - 1.0) * p;
    out.variance = (d - 1.0) * p * (1.0 - p);
    out.prob_r_plus_1 = (d - 1.0) * (d - 2.0) / 2.0 * p * p * std::pow(1.0 - p, d - 3.0);
    out.paper_printed = 10.0 * (d - 1.0) * (d - 1.0) / ((d - 2.0) * (d - 2.0)) *
                        std::pow(1.0 - 1.0 / (d - 1.0), -2.0 * (d - 3.0));
  } else if (const auto* rig = std::get_if<IntersectionParams>(&model)) {
    // X ~ Bin(n, min(Np,1)) with N ~ Bin(m,p); moments by conditioning on N
    const double n = static_cast<double>(rig->n);
    const double p = rig->p;
    double pmf = std::exp(static_cast<double>(rig->m) * std::log1p(-p));
    const double odds = p / (1.0 - p);
    double e_x = 0.0, e_x2 = 0.0, p2 = 0.0, cum = 0.0;
    for (std::uint64_t nn = 0; nn <= rig->m; ++nn) {
      if (nn > 0)
        pmf *= odds * (static_cast<double>(rig->m - nn + 1) / static_cast<double>(nn));
      const double q = std::min(static_cast<double>(nn) * p, 1.0);
      e_x += pmf * n * q;
      e_x2 += pmf * (n * q * (1.0 - q) + n * q * n * q);
      if (rig->n >= 2)
        p2 += pmf * (n * (n - 1.0) / 2.0) * q * q *
              std::exp((n - 2.0) * std::log1p(-q));
      cum += pmf;
      if (cum > 1.0 - 1e-16 && nn > static_cast<std::uint64_t>(2.0 * rig->m * p) + 16) break;
    }
    out.prefactor_c0 = 1.0;
    out.mean = e_x;
    out.variance = e_x2 - e_x * e_x;
    out.prob_r_plus_1 = p2;
  } else {
    throw std::invalid_argument(
        "upper_tail_constant: the quantum model uses quantum_upper_decomposition");
  }
  if (!(out.prob_r_plus_1 > 0.0))
    throw std::invalid_argument("upper_tail_constant: P(X = 2) vanished");
  out.c_star = out.prefactor_c0 / out.prob_r_plus_1 * (1.0 + 2.0 * out.variance);
  return out;
}

struct SimpleGraphFactor {
  double c_d = 0.0;     // exp((1-d^2)/4)
  double factor = 0.0;  // 2 / c_d
};

inline SimpleGraphFactor simple_graph_factor(std::uint32_t d) {
  if (d < 3) throw std::invalid_argument("simple_graph_factor: d must be >= 3");
  SimpleGraphFactor out;
  out.c_d = std::exp((1.0 - static_cast<double>(d) * static_cast<double>(d)) / 4.0);
  out.factor = 2.0 / out.c_d;
  return out;
}

// ---------------------------------------------------------------------------
// Quantum upper-tail decomposition.
// ---------------------------------------------------------------------------

// The walk increment law xi ~ Poisson(J/lambda) mixed over J ~ cut-gamma:
// pmf(k) = int_0^theta pois(k; x/lambda) x e^{-x} dx + e^{-theta}(1+theta) pois(k; theta/lambda),
// integrated by Simpson refinement, truncated at total mass 1 - 1e-15.
inline IncrementLaw mixed_poisson_cutgamma_law(double theta, double lambda) {
  if (!(theta > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("mixed_poisson_cutgamma_law: bad parameters");
  const auto pois = [&](int k, double rate) {
    return std::exp(static_cast<double>(k) * std::log(rate) - rate -
                    log_factorial(static_cast<std::uint64_t>(k)));
  };
  const auto integrand = [&](int k, double x) { return pois(k, x / lambda) * x * std::exp(-x); };
  const auto integral = [&](int k) {
    // composite Simpson with doubling until stable
    double prev = 0.0;
    for (int levels = 8;; ++levels) {
      const int segments = 1 << levels;
      const double hstep = theta / segments;
      KahanSum acc;
      acc.add(integrand(k, 1e-300));
      acc.add(integrand(k, theta));
      for (int i = 1; i < segments; ++i)
        acc.add((i % 2 == 1 ? 4.0 : 2.0) * integrand(k, i * hstep));
      const double val = acc.value() * hstep / 3.0;
      if (levels >= 10 && std::fabs(val - prev) < 1e-14) return val;
      if (levels >= 16) return val;
      prev = val;
    }
  };
  const double atom = std::exp(-theta) * (1.0 + theta);
  IncrementLaw law;
  double cum = 0.0;
  for (int k = 0;; ++k) {
    const double pk = integral(k) + atom * pois(k, theta / lambda);
    law.values.push_back(k);
    law.probs.push_back(pk);
    cum += pk;
    if (cum >= 1.0 - 1e-15) break;
    if (k > 300) break;
  }
  law.truncation_mass = std::max(0.0, 1.0 - cum);
  law.validate();
  return law;
}

struct QuantumUpperBound {
  double main_term = 0.0;
  double error_term = 0.0;
  double total = 0.0;
  double walk_survival = 0.0;  // P(1 + S_t > 0 for all t <= T)
  double truncation_mass = 0.0;
  bool critical_ok = true;      // |F(beta,lambda) - 1| small
  bool survival_by_mc = false;  // large T: Wilson upper limit instead of DP
};

// P(|C_max| > 2T) <= n E[k_v] / T * P(1 + S_t > 0 forall t <= T)
//                  + 2 n E[k_v^2] / T^2,
// with E[k_v] = theta + e^{-theta} and E[k_v^2] = theta + theta^2 + e^{-theta}.
// The walk probability comes from the exact DP up to moderate horizons; for
// large T a Monte Carlo run is used and its Wilson upper limit keeps the
// result an upper bound (up to the confidence level).
inline QuantumUpperBound quantum_upper_decomposition(const QuantumParams& params,
                                                     std::uint64_t t_horizon,
                                                     std::uint64_t mc_reps = 100000,
                                                     SeedSpec mc_seed = {20260101, 0}) {
  validate(params);
  if (t_horizon < 1) throw std::invalid_argument("quantum_upper_decomposition: T must be >= 1");
  QuantumUpperBound out;
  const double n = static_cast<double>(params.n);
  const double theta = params.theta;
  out.critical_ok = std::fabs(F_eval(params.beta, params.lambda) - 1.0) < 1e-6;
  const double e_k = theta + std::exp(-theta);
  const double e_k2 = theta + theta * theta + std::exp(-theta);
  out.error_term = 2.0 * n * e_k2 / (static_cast<double>(t_horizon) * t_horizon);
  const auto law = mixed_poisson_cutgamma_law(theta, params.lambda);
  out.truncation_mass = law.truncation_mass;
  if (t_horizon <= 8192) {
    out.walk_survival = positivity_prob_dp(law, 1, t_horizon);
  } else {
    out.survival_by_mc = true;
    out.walk_survival = simulate_survival(law, 1, t_horizon, mc_reps, mc_seed).ci_hi;
  }
  out.main_term = n * e_k / static_cast<double>(t_horizon) * out.walk_survival;
  out.total = out.main_term + out.error_term;
  return out;
}

// ---------------------------------------------------------------------------
// Theorem-bound assembly for the tail harness.
// ---------------------------------------------------------------------------

struct TheoremBound {
  double value = std::numeric_limits<double>::infinity();
  bool vacuous = true;
  bool hypotheses_ok = false;
};

// Theorem-1-style bound on P(|C_max| < n^{2/3}/A), assembled from the
// excursion bound (with the 2/c_d transfer and the (d-1)T excursion horizon
// for the regular model, and Chernoff-bounded tau probabilities for the
// intersection model).
inline TheoremBound lower_tail_bound(const ModelParams& model, double A) {
  const BoundSpec spec = lower_tail_spec(model, A);
  double p_tau1 = 0.0, p_tau2 = 0.0;
  double prefactor = 1.0;
  std::uint64_t n1 = spec.T;
  if (const auto* rig = std::get_if<IntersectionParams>(&model)) {
    const double mp = static_cast<double>(rig->m) * rig->p;
    const double x1 = 2.0 * mp * static_cast<double>(spec.T_prime);
    p_tau1 = chernoff_binomial(rig->m * spec.T_prime, rig->p, x1);
    const double drift = mp * static_cast<double>(spec.T_prime + spec.T);
    const double x2 = 3.0 * mp * static_cast<double>(spec.T_prime) - drift;
    p_tau2 = x2 > 0.0 ? chernoff_binomial(rig->m * (spec.T_prime + spec.T), rig->p, x2) : 1.0;
  } else if (const auto* reg = std::get_if<RegParams>(&model)) {
    prefactor = simple_graph_factor(reg->d).factor;
    n1 = (reg->d - 1) * spec.T;
  }
  TheoremBound out;
  if (n1 > spec.T_prime) return out;  // N1 <= N2 fails (A < d-1): vacuous, flagged
  const auto joint = jointprop_bound(spec, p_tau1, p_tau2, n1);
  out.hypotheses_ok = spec.hypotheses_ok();
  out.value = prefactor * joint.value;
  out.vacuous = joint.vacuous || !(out.value < 1.0);
  return out;
}

// Theorem-2-style bound on P(|C_max| > floor(A n^{2/3})): c_* n / k^{3/2} for
// the three walk-dominated models, the interval decomposition for quantum.
inline TheoremBound upper_tail_bound(const ModelParams& model, double A) {
  const std::uint64_t n = model_n(model);
  const double n23 = std::cbrt(static_cast<double>(n)) * std::cbrt(static_cast<double>(n));
  const auto k = static_cast<std::uint64_t>(std::floor(A * n23));
  TheoremBound out;
  if (k < 2) return out;  // threshold too small for a meaningful bound
  if (std::holds_alternative<QuantumParams>(model)) {
    const auto& q = std::get<QuantumParams>(model);
    const auto dec = quantum_upper_decomposition(q, k / 2);
    out.value = dec.total;
    out.hypotheses_ok = dec.critical_ok;
  } else {
    const auto c = upper_tail_constant(model);
    out.value = c.c_star * static_cast<double>(n) / std::pow(static_cast<double>(k), 1.5);
    out.hypotheses_ok = true;
  }
  out.vacuous = !(out.value < 1.0);
  return out;
}

}  // namespace critlab
