// Deterministic, splittable randomness and exact samplers.
//
// Every replicate owns a Stream keyed by (root_seed, stream_id); a draw is a
// pure function of (root_seed, stream_id, draw_index), so parallel runs are
// reproducible independent of scheduling.  The block function is Philox2x64-10
// with the stream id placed in the counter block: distinct streams are
// disjoint counter subspaces of the same keyed permutation.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace critlab {

struct SeedSpec {
  std::uint64_t root_seed = 0;
  std::uint64_t stream_id = 0;
};

namespace detail {

inline constexpr std::uint64_t kPhiloxMult = 0xD2B74407B1CE6E93ull;
inline constexpr std::uint64_t kPhiloxWeyl = 0x9E3779B97F4A7C15ull;

inline std::array<std::uint64_t, 2> philox2x64(std::uint64_t c0, std::uint64_t c1,
                                               std::uint64_t key) {
  for (int round = 0; round < 10; ++round) {
    const unsigned __int128 prod = static_cast<unsigned __int128>(kPhiloxMult) * c0;
    const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
    const std::uint64_t lo = static_cast<std::uint64_t>(prod);
    c0 = hi ^ key ^ c1;
    c1 = lo;
    key += kPhiloxWeyl;
  }
  return {c0, c1};
}

}  // namespace detail

// Value-semantic counter-based generator; safe to copy and to move between
// workers. One Stream per replicate.
class Stream {
 public:
  Stream() = default;
  explicit Stream(SeedSpec seed) : key_(seed.root_seed), stream_(seed.stream_id) {}
  Stream(std::uint64_t root_seed, std::uint64_t stream_id)
      : key_(root_seed), stream_(stream_id) {}

  std::uint64_t next_u64() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const auto block = detail::philox2x64(stream_, counter_++, key_);
    spare_ = block[1];
    have_spare_ = true;
    return block[0];
  }

  // 53-bit uniform mantissa in [0,1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Grid midpoints: strictly inside (0,1); used where log(0) must not occur.
  double next_unit_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Unbiased uniform integer in [0, n) (Lemire rejection).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Stream::below: n must be positive");
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    std::uint64_t lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t t = (0 - n) % n;
      while (lo < t) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t counter_ = 0;
  std::uint64_t spare_ = 0;
  bool have_spare_ = false;
};

// log(k!) with a fixed table below 1025 and a Stirling tail above it.
inline double log_factorial(std::uint64_t k) {
  static const std::vector<double> table = [] {
    std::vector<double> t(1025);
    long double acc = 0.0L;
    t[0] = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
      acc += std::log(static_cast<long double>(i));
      t[i] = static_cast<double>(acc);
    }
    return t;
  }();
  if (k < table.size()) return table[k];
  const double x = static_cast<double>(k) + 1.0;
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return (x - 0.5) * std::log(x) - x + 0.918938533204672742 +
         inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0));
}

// Exact Bernoulli(p): compares an infinite-precision uniform against p,
// 64 bits at a time, so the hit probability is p as a real number rather
// than p rounded to a 53-bit grid.
inline bool bernoulli(double p, Stream& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli: p outside [0,1]");
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  double rest = p;
  for (;;) {
    rest = std::ldexp(rest, 64);
    double ip;
    rest = std::modf(rest, &ip);
    const std::uint64_t block = static_cast<std::uint64_t>(ip);
    const std::uint64_t r = rng.next_u64();
    if (r < block) return true;
    if (r > block) return false;
    if (rest == 0.0) return false;
  }
}

namespace detail {

inline std::uint64_t binomial_inversion(std::uint64_t n, double p, Stream& rng) {
  // p <= 0.5 and n*p small; walk the cdf from k = 0.
  const double q = 1.0 - p;
  double pmf = std::exp(static_cast<double>(n) * std::log1p(-p));
  double cdf = pmf;
  const double odds = p / q;
  const double u = rng.next_unit();
  std::uint64_t k = 0;
  while (u > cdf && k < n) {
    ++k;
    pmf *= odds * (static_cast<double>(n - k + 1) / static_cast<double>(k));
    cdf += pmf;
  }
  return k;
}

// Transformed rejection with exact log-pmf acceptance (Hormann's BTRS);
// requires p <= 0.5 and n*p >= 10.
inline std::uint64_t binomial_btrs(std::uint64_t n, double p, Stream& rng) {
  const double nd = static_cast<double>(n);
  const double np = nd * p;
  const double spq = std::sqrt(np * (1.0 - p));
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = np + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double lpq = std::log(p / (1.0 - p));
  const std::uint64_t m = static_cast<std::uint64_t>(std::floor((nd + 1.0) * p));
  const double h_m = log_factorial(m) + log_factorial(n - m);
  for (;;) {
    const double u = rng.next_unit() - 0.5;
    double v = rng.next_unit();
    const double us = 0.5 - std::fabs(u);
    const double kd = std::floor((2.0 * a / us + b) * u + c);
    if (kd < 0.0 || kd > nd) continue;
    const std::uint64_t k = static_cast<std::uint64_t>(kd);
    if (us >= 0.07 && v <= v_r) return k;
    v = std::log(v * alpha / (a / (us * us) + b));
    const double log_ratio = h_m - log_factorial(k) - log_factorial(n - k) +
                             (static_cast<double>(k) - static_cast<double>(m)) * lpq;
    if (v <= log_ratio) return k;
  }
}

inline std::uint64_t poisson_knuth(double mu, Stream& rng) {
  const double limit = std::exp(-mu);
  double prod = 1.0;
  std::uint64_t k = 0;
  for (;;) {
    prod *= rng.next_unit_open();
    if (prod <= limit) return k;
    ++k;
  }
}

// Hormann's PTRS, exact acceptance via log pmf; requires mu >= 10.
inline std::uint64_t poisson_ptrs(double mu, Stream& rng) {
  const double b = 0.931 + 2.53 * std::sqrt(mu);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double lmu = std::log(mu);
  for (;;) {
    const double u = rng.next_unit() - 0.5;
    double v = rng.next_unit();
    const double us = 0.5 - std::fabs(u);
    const double kd = std::floor((2.0 * a / us + b) * u + mu + 0.43);
    if (us >= 0.07 && v <= v_r && kd >= 0.0) return static_cast<std::uint64_t>(kd);
    if (kd < 0.0 || (us < 0.013 && v > us)) continue;
    const std::uint64_t k = static_cast<std::uint64_t>(kd);
    v = std::log(v * inv_alpha / (a / (us * us) + b));
    if (v <= static_cast<double>(k) * lmu - mu - log_factorial(k)) return k;
  }
}

}  // namespace detail

// Exact Bin(N,q) sample; inversion when N*min(q,1-q) < 30, transformed
// rejection otherwise. No normal or Poisson approximation on any path.
inline std::uint64_t binomial(std::uint64_t n, double q, Stream& rng) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("binomial: q outside [0,1]");
  if (n == 0 || q <= 0.0) return 0;
  if (q >= 1.0) return n;
  const bool flipped = q > 0.5;
  const double p = flipped ? 1.0 - q : q;
  const std::uint64_t k = (static_cast<double>(n) * p < 30.0)
                              ? detail::binomial_inversion(n, p, rng)
                              : detail::binomial_btrs(n, p, rng);
  return flipped ? n - k : k;
}

inline std::uint64_t poisson(double mu, Stream& rng) {
  if (!(mu >= 0.0)) throw std::invalid_argument("poisson: mu must be >= 0");
  if (mu == 0.0) return 0;
  return mu < 10.0 ? detail::poisson_knuth(mu, rng) : detail::poisson_ptrs(mu, rng);
}

inline double exponential(double rate, Stream& rng) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
  return -std::log(rng.next_unit_open()) / rate;
}

struct CutGammaParams {
  double theta;
};

// J = (E1 + E2) ^ theta for independent Exp(1) draws; the atom at theta is
// reached only through the min.
inline double cut_gamma(CutGammaParams params, Stream& rng) {
  if (!(params.theta > 0.0)) throw std::invalid_argument("cut_gamma: theta must be > 0");
  const double sum = exponential(1.0, rng) + exponential(1.0, rng);
  return sum < params.theta ? sum : params.theta;
}

// E[J] for J ~ cut-gamma on a circle of length theta.
inline double cut_gamma_mean(double theta) {
  return 2.0 * (1.0 - std::exp(-theta)) - theta * std::exp(-theta);
}

}  // namespace critlab
