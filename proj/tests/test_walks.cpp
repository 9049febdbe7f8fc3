#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "critlab/walks.hpp"

using namespace critlab;

TEST_CASE("increment law validation and factories") {
  REQUIRE_THROWS_AS(IncrementLaw{}.validate(), std::invalid_argument);
  REQUIRE_THROWS_AS(IncrementLaw::from_values({0, 1}, {0.5, 0.6}), std::invalid_argument);
  REQUIRE_THROWS_AS(IncrementLaw::from_values({-1, 1}, {0.5, 0.5}), std::invalid_argument);

  const auto bin = IncrementLaw::binomial_rational(2, 1, 2);
  REQUIRE(bin.values == std::vector<int>{0, 1, 2});
  REQUIRE(bin.weights == std::vector<std::uint64_t>{1, 2, 1});
  REQUIRE(bin.weight_den == 4);
  REQUIRE(bin.mean() == Catch::Approx(1.0));
  REQUIRE(bin.variance() == Catch::Approx(0.5));

  const auto trunc = IncrementLaw::binomial(10000, 1e-4);
  REQUIRE(trunc.truncation_mass <= 1e-15);
  REQUIRE(trunc.mean() <= 1.0);
  REQUIRE(trunc.values.size() < 40);

  const auto pois = IncrementLaw::poisson(1.0);
  REQUIRE(pois.mean() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("positivity DP matches hand-enumerated values") {
  const auto law = IncrementLaw::binomial_rational(2, 1, 2);
  REQUIRE(positivity_prob_dp(law, 1, 1) == 0.75);
  REQUIRE(positivity_prob_dp(law, 1, 2) == 0.625);

  REQUIRE_THROWS_AS(positivity_prob_dp(law, 1, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(positivity_prob_dp(law, 0, 5), std::invalid_argument);

  // a high start cannot die within one step
  REQUIRE(positivity_prob_dp(law, 1000000, 1) == 1.0);
}

TEST_CASE("positivity DP monotone in horizon and in start") {
  const auto law = IncrementLaw::binomial_rational(2, 1, 2);
  const auto curve = positivity_prob_curve(law, 1, 200);
  for (std::size_t t = 1; t < curve.size(); ++t) REQUIRE(curve[t] <= curve[t - 1] + 1e-15);
  for (std::uint64_t r = 1; r < 6; ++r)
    REQUIRE(positivity_prob_dp(law, r, 50) <= positivity_prob_dp(law, r + 1, 50) + 1e-15);
}

TEST_CASE("capped DP is an upper bound") {
  const auto law = IncrementLaw::binomial_rational(2, 1, 2);
  const double exact = positivity_prob_dp(law, 1, 100);
  const double capped = positivity_prob_dp(law, 1, 100, 5);
  REQUIRE(capped >= exact - 1e-15);
}

TEST_CASE("simulate_survival agrees with DP") {
  const auto law = IncrementLaw::binomial_rational(2, 1, 2);
  const auto est = simulate_survival(law, 1, 2, 1000000, {9001, 0});
  REQUIRE(est.contains(0.625));

  const auto constant = IncrementLaw::from_values({1}, {1.0});
  REQUIRE(simulate_survival(constant, 1, 10, 1000, {1, 0}).p_hat == 1.0);

  const auto dies = IncrementLaw::from_values({0}, {1.0});
  REQUIRE(simulate_survival(dies, 1, 3, 1000, {1, 0}).p_hat == 0.0);
}

TEST_CASE("simulate_survival CI calibration over seeds") {
  const auto law = IncrementLaw::binomial_rational(2, 1, 2);
  const double truth = positivity_prob_dp(law, 1, 5);
  int covered = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto est = simulate_survival(law, 1, 5, 4000, {555 + s, s * 1000});
    if (est.contains(truth)) ++covered;
  }
  REQUIRE(covered >= 198);
}

TEST_CASE("ballot estimate holds exhaustively") {
  SECTION("fair +-1 increments") {
    const auto law = IncrementLaw::fair_pm1();
    const auto rep = ballot_check(law, 1, 0.0, 4);
    REQUIRE(rep.exact_arithmetic);
    REQUIRE(rep.pass);
    REQUIRE(rep.max_ratio <= 1.0 + 1e-12);
  }
  SECTION("binomial increments with a raised barrier") {
    // the start is constrained too: with r = 1 <= a = 1 the left side is
    // vacuously zero (and the estimate would actually fail without that)
    const auto law = IncrementLaw::binomial_rational(2, 1, 2);
    const auto rep = ballot_check(law, 1, 1.0, 6);
    REQUIRE(rep.exact_arithmetic);
    REQUIRE(rep.pass);
    for (const auto& row : rep.rows) REQUIRE(row.lhs == 0.0);
  }
  SECTION("nontrivial raised barrier with a wider law") {
    // increments in {-1,0,1,2}: r = 2 > a = 1 gives surviving paths
    const auto law = IncrementLaw::binomial_rational(3, 1, 3);
    const auto rep = ballot_check(law, 2, 1.0, 5);
    REQUIRE(rep.exact_arithmetic);
    REQUIRE(rep.pass);
    double lhs_total = 0.0;
    for (const auto& row : rep.rows) lhs_total += row.lhs;
    REQUIRE(lhs_total > 0.0);

    // exhaustive path enumeration over the 4^5 increment sequences
    const int n = 5;
    std::vector<double> lhs_by_j(16, 0.0);
    const int vals[4] = {0, 1, 2, 3};
    const double ps[4] = {8.0 / 27.0, 12.0 / 27.0, 6.0 / 27.0, 1.0 / 27.0};
    for (int code = 0; code < 1024; ++code) {
      int c = code;
      int pos = 2;
      double w = 1.0;
      bool alive = pos > 1;
      for (int t = 0; t < n && alive; ++t) {
        const int i = c % 4;
        c /= 4;
        pos += vals[i] - 1;
        w *= ps[i];
        if (!(pos > 1)) alive = false;
      }
      if (alive) lhs_by_j[static_cast<std::size_t>(pos)] += w;
    }
    for (const auto& row : rep.rows) {
      REQUIRE(row.lhs ==
              Catch::Approx(lhs_by_j[static_cast<std::size_t>(row.j)]).margin(1e-14));
    }
  }
  SECTION("barrier so high that no path survives") {
    const auto law = IncrementLaw::fair_pm1();
    const auto rep = ballot_check(law, 1, 50.0, 4);
    REQUIRE(rep.pass);
    for (const auto& row : rep.rows) REQUIRE(row.lhs == 0.0);
  }
  SECTION("undefined RHS is a parameter error") {
    REQUIRE_THROWS_AS(ballot_check(IncrementLaw::fair_pm1(), 2, 0.0, 4), std::invalid_argument);
  }
  SECTION("double fallback agrees") {
    auto law = IncrementLaw::binomial_rational(2, 1, 2);
    law.weights.clear();
    law.weight_den = 0;  // force the floating-point path
    const auto rep = ballot_check(law, 1, 0.0, 6);
    REQUIRE_FALSE(rep.exact_arithmetic);
    REQUIRE(rep.pass);
  }
}

TEST_CASE("favourable rotation counting") {
  const auto all_up = favourable_count({1, 1, 1}, 0.0);
  REQUIRE(all_up.count == 3);
  REQUIRE(all_up.total == 3);
  REQUIRE(all_up.claim_applicable);

  const auto mixed = favourable_count({1, -1, 1}, 0.0);
  REQUIRE(mixed.total == 1);
  REQUIRE(mixed.count <= 1);

  const auto vacuous = favourable_count({-1, 1, -1}, 0.0);
  REQUIRE_FALSE(vacuous.claim_applicable);
  REQUIRE(vacuous.count == 0);
}

TEST_CASE("survival bound values and hypotheses") {
  const auto law = IncrementLaw::binomial_rational(2, 1, 2);
  REQUIRE(survival_bound(law, 1, 100) == Catch::Approx(0.8).epsilon(1e-12));
  REQUIRE(survival_bound(law, 1, 1) == Catch::Approx(8.0).epsilon(1e-12));

  const auto supercritical = IncrementLaw::from_values({0, 2}, {0.4, 0.6});
  REQUIRE_THROWS_AS(survival_bound(supercritical, 1, 10), std::invalid_argument);

  const auto pois = IncrementLaw::poisson(1.0);
  REQUIRE(survival_bound(pois, 1, 100000000) < 0.002);

  const auto rep = walk_bound_report(law, 1, 100);
  REQUIRE(rep.slack == Catch::Approx(rep.bound - rep.exact_prob));
}

TEST_CASE("DP is dominated by the survival bound on a k-grid") {
  for (const auto& law :
       {IncrementLaw::binomial_rational(2, 1, 2), IncrementLaw::binomial(10000, 1e-4)}) {
    const auto curve = positivity_prob_curve(law, 1, 2000);
    for (std::uint64_t k = 1; k <= 2000; k = k < 10 ? k + 1 : k * 2)
      REQUIRE(curve[k - 1] <= survival_bound(law, 1, k));
  }
}
