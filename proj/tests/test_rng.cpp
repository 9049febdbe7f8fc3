#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "critlab/rng.hpp"
#include "critlab/stats.hpp"

using namespace critlab;

TEST_CASE("streams replay bit-exactly") {
  Stream a(42, 7);
  Stream b(42, 7);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());

  Stream c(42, 8);
  Stream d(42, 7);
  bool all_equal = true;
  for (int i = 0; i < 64; ++i)
    if (c.next_u64() != d.next_u64()) all_equal = false;
  REQUIRE_FALSE(all_equal);
}

TEST_CASE("stream copies are independent values") {
  Stream a(1, 1);
  (void)a.next_u64();
  Stream b = a;
  const auto xa = a.next_u64();
  const auto xb = b.next_u64();
  REQUIRE(xa == xb);
}

TEST_CASE("bernoulli degenerate and errors") {
  Stream g(1, 0);
  for (int i = 0; i < 100; ++i) REQUIRE_FALSE(bernoulli(0.0, g));
  for (int i = 0; i < 100; ++i) REQUIRE(bernoulli(1.0, g));
  REQUIRE_THROWS_AS(bernoulli(-0.1, g), std::invalid_argument);
  REQUIRE_THROWS_AS(bernoulli(1.1, g), std::invalid_argument);
}

TEST_CASE("bernoulli mean lands in CLT band") {
  Stream g(2024, 0);
  const std::uint64_t reps = 1000000;
  std::uint64_t ones = 0;
  for (std::uint64_t i = 0; i < reps; ++i) ones += bernoulli(0.5, g) ? 1 : 0;
  const double mean = static_cast<double>(ones) / static_cast<double>(reps);
  const double band = 3.0 * std::sqrt(0.25 / static_cast<double>(reps));
  REQUIRE(std::fabs(mean - 0.5) < band);
}

TEST_CASE("bernoulli is exact for tiny probabilities") {
  // p far below the 53-bit grid of a single uniform draw
  Stream g(3, 0);
  const double p = 0x1.0p-40;
  const std::uint64_t reps = 1 << 22;
  std::uint64_t ones = 0;
  for (std::uint64_t i = 0; i < reps; ++i) ones += bernoulli(p, g) ? 1 : 0;
  // expectation ~ 3.8e-6; seeing many would indicate a grid artifact
  REQUIRE(ones < 10);
}

TEST_CASE("binomial degenerate and errors") {
  Stream g(5, 0);
  REQUIRE(binomial(100, 0.0, g) == 0);
  REQUIRE(binomial(100, 1.0, g) == 100);
  REQUIRE(binomial(0, 0.5, g) == 0);
  REQUIRE_THROWS_AS(binomial(10, -0.5, g), std::invalid_argument);
  REQUIRE_THROWS_AS(binomial(10, 1.5, g), std::invalid_argument);
}

TEST_CASE("binomial(99, 1/100) moments") {
  Stream g(11, 0);
  const std::uint64_t reps = 1000000;
  Welford w1, w2;
  for (std::uint64_t i = 0; i < reps; ++i) {
    const double x = static_cast<double>(binomial(99, 0.01, g));
    w1.add(x);
    w2.add(x * x);
  }
  // mean 0.99, second moment Mq(1-q) + (Mq)^2 = 1.9602
  REQUIRE(std::fabs(w1.mean - 0.99) < 3.0 * w1.stderr_mean());
  REQUIRE(std::fabs(w2.mean - 1.9602) < 3.0 * w2.stderr_mean());
}

namespace {

double exact_binomial_pmf(std::uint64_t n, double p, std::uint64_t k) {
  const double logp = log_factorial(n) - log_factorial(k) - log_factorial(n - k) +
                      static_cast<double>(k) * std::log(p) +
                      static_cast<double>(n - k) * std::log1p(-p);
  return std::exp(logp);
}

// Chi-square goodness of fit against a discrete pmf given by `expected`
// (absolute counts); bins with expectation < 8 are pooled into the tail.
double chi_square_gof(const std::vector<double>& expected, const std::vector<double>& observed,
                      int* out_dof) {
  double stat = 0.0;
  double pool_e = 0.0, pool_o = 0.0;
  int bins = 0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (expected[i] >= 8.0) {
      stat += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
      ++bins;
    } else {
      pool_e += expected[i];
      pool_o += observed[i];
    }
  }
  if (pool_e > 0.0) {
    stat += (pool_o - pool_e) * (pool_o - pool_e) / pool_e;
    ++bins;
  }
  *out_dof = bins - 1;
  return stat;
}

}  // namespace

TEST_CASE("binomial matches the exact pmf (chi-square, inversion path)") {
  const std::uint64_t reps = 1000000;
  for (const auto& [n, p] : std::vector<std::pair<std::uint64_t, double>>{{5, 0.3}, {20, 0.5}}) {
    Stream g(77, n);
    std::vector<double> observed(n + 1, 0.0), expected(n + 1, 0.0);
    for (std::uint64_t i = 0; i < reps; ++i) observed[binomial(n, p, g)] += 1.0;
    for (std::uint64_t k = 0; k <= n; ++k)
      expected[k] = exact_binomial_pmf(n, p, k) * static_cast<double>(reps);
    int dof = 0;
    const double stat = chi_square_gof(expected, observed, &dof);
    REQUIRE(chi_square_pvalue(stat, dof) > 0.001);
  }
}

TEST_CASE("binomial matches the exact pmf (chi-square, rejection path)") {
  const std::uint64_t n = 200;
  const double p = 0.4;  // n*p = 80 >> 30: exercises the BTRS sampler
  const std::uint64_t reps = 200000;
  Stream g(78, 0);
  std::vector<double> observed(n + 1, 0.0), expected(n + 1, 0.0);
  for (std::uint64_t i = 0; i < reps; ++i) observed[binomial(n, p, g)] += 1.0;
  for (std::uint64_t k = 0; k <= n; ++k)
    expected[k] = exact_binomial_pmf(n, p, k) * static_cast<double>(reps);
  int dof = 0;
  const double stat = chi_square_gof(expected, observed, &dof);
  REQUIRE(chi_square_pvalue(stat, dof) > 0.001);
}

TEST_CASE("poisson degenerate, pmf point and variance") {
  Stream g(13, 0);
  REQUIRE(poisson(0.0, g) == 0);
  REQUIRE_THROWS_AS(poisson(-1.0, g), std::invalid_argument);

  const std::uint64_t reps = 1000000;
  std::uint64_t zeros = 0;
  Welford w;
  for (std::uint64_t i = 0; i < reps; ++i) {
    const auto x = poisson(1.0, g);
    if (x == 0) ++zeros;
    w.add(static_cast<double>(x));
  }
  const double p0 = static_cast<double>(zeros) / static_cast<double>(reps);
  const double target = std::exp(-1.0);
  const double band = 3.0 * std::sqrt(target * (1.0 - target) / static_cast<double>(reps));
  REQUIRE(std::fabs(p0 - target) < band);
  // Var = 1; central fourth moment of Poisson(1) gives SE(var) ~ sqrt(3/reps)
  REQUIRE(std::fabs(w.variance() - 1.0) < 3.0 * std::sqrt(3.0 / static_cast<double>(reps)));
}

TEST_CASE("poisson matches the exact pmf (chi-square, rejection path)") {
  const double mu = 30.0;
  const std::uint64_t reps = 200000;
  Stream g(14, 0);
  const std::size_t kmax = 100;
  std::vector<double> observed(kmax + 1, 0.0), expected(kmax + 1, 0.0);
  for (std::uint64_t i = 0; i < reps; ++i) {
    const auto x = poisson(mu, g);
    observed[std::min<std::uint64_t>(x, kmax)] += 1.0;
  }
  for (std::size_t k = 0; k <= kmax; ++k)
    expected[k] = std::exp(static_cast<double>(k) * std::log(mu) - mu - log_factorial(k)) *
                  static_cast<double>(reps);
  int dof = 0;
  const double stat = chi_square_gof(expected, observed, &dof);
  REQUIRE(chi_square_pvalue(stat, dof) > 0.001);
}

TEST_CASE("exponential moments and survival") {
  Stream g(15, 0);
  REQUIRE_THROWS_AS(exponential(0.0, g), std::invalid_argument);
  REQUIRE_THROWS_AS(exponential(-2.0, g), std::invalid_argument);

  const std::uint64_t reps = 1000000;
  Welford w1, w2;
  std::uint64_t above_one = 0;
  for (std::uint64_t i = 0; i < reps; ++i) {
    const double x = exponential(1.0, g);
    w1.add(x);
    if (x > 1.0) ++above_one;
    w2.add(exponential(2.0, g));
  }
  REQUIRE(std::fabs(w1.mean - 1.0) < 3.0 * w1.stderr_mean());
  REQUIRE(std::fabs(w2.mean - 0.5) < 3.0 * w2.stderr_mean());
  const double target = std::exp(-1.0);
  const double band = 3.0 * std::sqrt(target * (1.0 - target) / static_cast<double>(reps));
  REQUIRE(std::fabs(static_cast<double>(above_one) / static_cast<double>(reps) - target) < band);
}

TEST_CASE("cut-gamma mean, atom and limits") {
  Stream g(16, 0);
  REQUIRE_THROWS_AS(cut_gamma({0.0}, g), std::invalid_argument);

  const std::uint64_t reps = 1000000;
  for (const double theta : {0.5, 1.0, 2.0, 5.0, 50.0}) {
    Welford w;
    Stream gg(16, static_cast<std::uint64_t>(theta * 10));
    for (std::uint64_t i = 0; i < reps; ++i) w.add(cut_gamma({theta}, gg));
    REQUIRE(std::fabs(w.mean - cut_gamma_mean(theta)) < 3.0 * w.stderr_mean());
  }

  // atom: P(J = theta) = e^{-theta}(1 + theta)
  std::uint64_t at_theta = 0;
  for (std::uint64_t i = 0; i < reps; ++i)
    if (cut_gamma({1.0}, g) == 1.0) ++at_theta;
  const double target = std::exp(-1.0) * 2.0;
  const double band = 3.0 * std::sqrt(target * (1.0 - target) / static_cast<double>(reps));
  REQUIRE(std::fabs(static_cast<double>(at_theta) / static_cast<double>(reps) - target) < band);

  // small-theta limit: values live in (0, theta], so the mean is ~ F(theta) ~ theta
  Welford w_small;
  for (std::uint64_t i = 0; i < 10000; ++i) w_small.add(cut_gamma({0.01}, g));
  REQUIRE(w_small.mean > 0.0);
  REQUIRE(w_small.mean <= 0.01);
  REQUIRE(std::fabs(w_small.mean - cut_gamma_mean(0.01)) < 0.001);
}

TEST_CASE("stats utilities") {
  const auto e = wilson(10, 100);
  REQUIRE(e.ci_lo <= e.p_hat);
  REQUIRE(e.p_hat <= e.ci_hi);
  REQUIRE(e.p_hat == Catch::Approx(0.1));

  const auto zero = wilson(0, 100);
  REQUIRE(zero.ci_lo == 0.0);
  REQUIRE(zero.ci_hi > 0.0);

  REQUIRE(chi_square_pvalue(3.841, 1) == Catch::Approx(0.05).margin(0.001));
  REQUIRE(median(std::vector<int>{3, 1, 2}) == 2.0);
  REQUIRE(median(std::vector<int>{4, 1, 2, 3}) == 2.5);

  KahanSum ks;
  for (int i = 0; i < 10; ++i) ks.add(0.1);
  REQUIRE(ks.value() == Catch::Approx(1.0).epsilon(1e-15));
}
