// Small statistical utilities shared by the walk, harness and test code:
// Wilson intervals, compensated summation, chi-square tail probabilities.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace critlab {

inline constexpr double kWilsonZ99 = 2.576;  // two-sided 99% level

struct Estimate {
  std::uint64_t hits = 0;
  std::uint64_t reps = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;

  bool contains(double p) const { return ci_lo <= p && p <= ci_hi; }
};

inline Estimate wilson(std::uint64_t hits, std::uint64_t reps, double z = kWilsonZ99) {
  if (reps == 0) throw std::invalid_argument("wilson: reps must be >= 1");
  Estimate e;
  e.hits = hits;
  e.reps = reps;
  const double n = static_cast<double>(reps);
  const double p = static_cast<double>(hits) / n;
  e.p_hat = p;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  e.ci_lo = std::max(0.0, center - half);
  e.ci_hi = std::min(1.0, center + half);
  return e;
}

struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

struct Welford {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double stddev() const { return std::sqrt(variance()); }
  double stderr_mean() const { return stddev() / std::sqrt(static_cast<double>(n)); }
};

namespace detail {

// Regularized upper incomplete gamma Q(a,x): series for x < a+1, Lentz
// continued fraction otherwise.
inline double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("regularized_gamma_q: bad args");
  if (x == 0.0) return 1.0;
  const double lg = std::lgamma(a);
  const double prefix = std::exp(-x + a * std::log(x) - lg);
  if (x < a + 1.0) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < 1000; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return 1.0 - prefix * sum;
  }
  double b = x + 1.0 - a;
  double c = 1e300;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::fabs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return prefix * h;
}

}  // namespace detail

inline double chi_square_pvalue(double statistic, int dof) {
  if (dof <= 0) throw std::invalid_argument("chi_square_pvalue: dof must be positive");
  return detail::regularized_gamma_q(dof / 2.0, statistic / 2.0);
}

template <typename T>
double median(std::vector<T> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return static_cast<double>(values[n / 2]);
  return 0.5 * (static_cast<double>(values[n / 2 - 1]) + static_cast<double>(values[n / 2]));
}

}  // namespace critlab
