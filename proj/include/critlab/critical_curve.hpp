// The quantum model's critical curve F(beta, lambda) = 1, where
// F(beta, lambda) = lambda^{-1} (2(1 - e^{-lambda beta}) - lambda beta e^{-lambda beta})
// is the expected interval length.  Roots by plain bisection; F is cheap.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "critlab/rng.hpp"

namespace critlab {

inline double F_eval(double beta, double lambda) {
  if (!(beta > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("F_eval: beta and lambda must be > 0");
  return cut_gamma_mean(lambda * beta) / lambda;
}

namespace detail {

template <class Fn>
double bisect_root(Fn&& f, double lo, double hi, double tol, const char* what) {
  double flo = f(lo);
  const double fhi = f(hi);
  // a strict crossing is required: an endpoint that merely rounds to zero
  // (e.g. F -> 2/lambda from below) is not a root
  if (!(flo * fhi < 0.0))
    throw std::invalid_argument(std::string(what) + ": no sign change in bracket");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (std::fabs(fmid) < tol) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Critical beta for fixed lambda.  sup_beta F(beta, lambda) = 2/lambda, so a
// root exists only for lambda < 2.
inline double critical_beta(double lambda, double lo = 1e-6, double hi = 50.0) {
  if (!(lambda > 0.0)) throw std::invalid_argument("critical_beta: lambda must be > 0");
  return detail::bisect_root([lambda](double b) { return F_eval(b, lambda) - 1.0; }, lo, hi,
                             1e-13, "critical_beta");
}

// Critical lambda for fixed beta.  F(beta, lambda) -> beta as lambda -> 0 and
// -> 0 as lambda -> infinity, so a root exists only for beta > 1.
inline double critical_lambda(double beta, double lo = 1e-6, double hi = 50.0) {
  if (!(beta > 0.0)) throw std::invalid_argument("critical_lambda: beta must be > 0");
  return detail::bisect_root([beta](double l) { return F_eval(beta, l) - 1.0; }, lo, hi,
                             1e-13, "critical_lambda");
}

}  // namespace critlab
