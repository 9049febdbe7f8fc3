#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "critlab/harness.hpp"
#include "critlab/oracles.hpp"

using namespace critlab;

TEST_CASE("run_replicates is thread-count invariant") {
  ExperimentConfig cfg;
  cfg.model = ErParams{200, 1.0 / 200.0};
  cfg.replicates = 500;
  cfg.seed = {777, 0};
  cfg.threads = 1;
  const auto one = run_replicates(cfg);
  cfg.threads = 4;
  const auto four = run_replicates(cfg);
  cfg.threads = 8;
  const auto eight = run_replicates(cfg);
  REQUIRE(one.size() == 500);
  for (std::size_t i = 0; i < one.size(); ++i) {
    REQUIRE(one[i].cmax == four[i].cmax);
    REQUIRE(one[i].cmax == eight[i].cmax);
    REQUIRE(one[i].num_components == eight[i].num_components);
  }
  cfg.replicates = 0;
  REQUIRE_THROWS_AS(run_replicates(cfg), std::invalid_argument);
}

TEST_CASE("replicate errors carry the replicate index") {
  ExperimentConfig cfg;
  cfg.model = ErParams{0, 0.5};  // invalid: n = 0
  cfg.replicates = 4;
  cfg.threads = 2;
  REQUIRE_THROWS_AS(run_replicates(cfg), invariant_error);
}

TEST_CASE("empirical pmf close to the oracle through the harness") {
  ExperimentConfig cfg;
  cfg.model = ErParams{4, 0.25};
  cfg.replicates = 200000;
  cfg.seed = {990, 0};
  cfg.threads = 2;
  const auto samples = run_replicates(cfg);
  std::vector<std::uint64_t> cmax;
  for (const auto& s : samples) cmax.push_back(s.cmax);
  REQUIRE(tv_distance(pmf_from_samples(cmax), er_exact(4, 0.25)) < 0.01);
}

TEST_CASE("tail estimates follow the theorem events exactly") {
  // synthetic samples with a known distribution of cmax
  std::vector<ReplicateSample> samples;
  for (std::uint64_t v : {10, 20, 30, 40, 50}) samples.push_back({v, 1});
  const ModelParams model{ErParams{1000, 1e-3}};  // n^{2/3} = 100
  const auto lower = tail_estimates(samples, model, {2.0, 4.0}, TailDirection::lower);
  // thresholds: ceil(100/2) = 50, ceil(100/4) = 25
  REQUIRE(lower[0].threshold == 50);
  REQUIRE(lower[0].hits == 4);  // cmax < 50: {10,20,30,40}
  REQUIRE(lower[1].threshold == 25);
  REQUIRE(lower[1].hits == 2);  // {10, 20}
  REQUIRE(lower[0].ci_lo <= lower[0].p_hat);
  REQUIRE(lower[0].p_hat == Catch::Approx(0.8));

  const auto upper = tail_estimates(samples, model, {0.2}, TailDirection::upper);
  REQUIRE(upper[0].threshold == 20);  // floor(0.2 * 100)
  REQUIRE(upper[0].hits == 3);        // cmax > 20: {30,40,50}

  // A >= n^{2/3}: the lower event is empty and pinned to zero
  const auto pinned = tail_estimates(samples, model, {100.0}, TailDirection::lower);
  REQUIRE(pinned[0].pinned_zero);
  REQUIRE(pinned[0].hits == 0);
  REQUIRE(pinned[0].ci_hi > 0.0);

  REQUIRE_THROWS_AS(tail_estimates({}, model, {2.0}, TailDirection::lower),
                    std::invalid_argument);
}

namespace {

std::vector<TailEstimate> synthetic_decay(double exponent, std::uint64_t reps) {
  std::vector<TailEstimate> out;
  for (const double a : {2.0, 4.0, 8.0, 16.0}) {
    TailEstimate te;
    te.a = a;
    te.reps = reps;
    te.hits = static_cast<std::uint64_t>(std::pow(a, -exponent) * static_cast<double>(reps));
    const auto est = wilson(te.hits, te.reps);
    te.p_hat = est.p_hat;
    te.ci_lo = est.ci_lo;
    te.ci_hi = est.ci_hi;
    out.push_back(te);
  }
  return out;
}

}  // namespace

TEST_CASE("decay check on synthetic curves") {
  const auto steep = decay_check(synthetic_decay(2.0, 100000000), 0.5);
  REQUIRE(steep.conclusive);
  REQUIRE(steep.pass);
  REQUIRE(decay_check(synthetic_decay(2.0, 100000000), 1.5).pass);

  const auto shallow = decay_check(synthetic_decay(0.3, 100000000), 0.5);
  REQUIRE(shallow.conclusive);
  REQUIRE_FALSE(shallow.pass);

  // one informative pair suffices: a zero-hit upper cell confirms fast decay
  auto one_nonzero = synthetic_decay(2.0, 100000000);
  for (std::size_t i = 1; i < one_nonzero.size(); ++i) {
    one_nonzero[i].hits = 0;
    const auto est = wilson(0, one_nonzero[i].reps);
    one_nonzero[i].p_hat = 0.0;
    one_nonzero[i].ci_lo = est.ci_lo;
    one_nonzero[i].ci_hi = est.ci_hi;
  }
  const auto partial = decay_check(one_nonzero, 0.5);
  REQUIRE(partial.conclusive);
  REQUIRE(partial.pass);

  std::vector<TailEstimate> zeros(3);
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    zeros[i].a = 2.0 * (i + 1);
    zeros[i].reps = 100;
    const auto est = wilson(0, 100);
    zeros[i].ci_lo = est.ci_lo;
    zeros[i].ci_hi = est.ci_hi;
  }
  REQUIRE_FALSE(decay_check(zeros, 0.5).conclusive);
}

TEST_CASE("scaling fit on synthetic medians") {
  const std::vector<std::uint64_t> ns{1000, 2000, 4000, 8000, 16000};
  std::vector<double> exact;
  for (const auto n : ns) exact.push_back(std::pow(static_cast<double>(n), 2.0 / 3.0));
  const auto fit = fit_loglog(ns, exact);
  REQUIRE(fit.slope == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
  REQUIRE(fit.stderr_slope == Catch::Approx(0.0).margin(1e-10));

  std::vector<double> flat(ns.size(), 7.0);
  REQUIRE(fit_loglog(ns, flat).slope == Catch::Approx(0.0).margin(1e-12));

  REQUIRE_THROWS_AS(fit_loglog({10, 20, 30}, {1.0, 2.0, 3.0}), std::invalid_argument);
  std::vector<double> bad(ns.size(), 0.0);
  REQUIRE_THROWS_AS(fit_loglog(ns, bad), std::invalid_argument);
}

TEST_CASE("wilson coverage calibration") {
  // known Bernoulli(p = 0.1): the 99% interval covers p in >= 98% of trials
  const double p = 0.1;
  int covered = 0;
  const int trials = 500;
  for (int trial = 0; trial < trials; ++trial) {
    Stream g(512, static_cast<std::uint64_t>(trial));
    const std::uint64_t reps = 1000;
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < reps; ++i) hits += bernoulli(p, g) ? 1 : 0;
    if (wilson(hits, reps).contains(p)) ++covered;
  }
  REQUIRE(covered >= trials * 98 / 100);
}

TEST_CASE("stopping stats on critical ER") {
  const ErParams er{2000, 1.0 / 2000.0};
  auto spec = lower_tail_spec(ModelParams{er}, 4.0);
  const auto stats = stopping_stats(ModelParams{er}, spec, 2000, {31, 0}, 2);
  REQUIRE(stats.n2 == spec.T_prime);
  REQUIRE(stats.tau_h_capped.reps == 2000);
  // h < 1 here, so R >= h as soon as any step leaves R positive: the capped
  // event is essentially impossible
  REQUIRE(stats.tau_h_capped.p_hat < 0.01);
  REQUIRE(stats.short_run_bound > 0.0);

  // with every excursion a component, {all excursions < N1, reached} tracks
  // the lower-tail event {cmax < T} up to the negligible no-reach paths
  ExperimentConfig cfg;
  cfg.model = er;
  cfg.replicates = 2000;
  cfg.seed = {31, 0};
  cfg.threads = 2;
  const auto samples = run_replicates(cfg);
  std::uint64_t below = 0;
  for (const auto& s : samples)
    if (s.cmax < spec.T) ++below;
  const auto direct = wilson(below, samples.size());
  REQUIRE(std::fabs(direct.p_hat - stats.reach_then_short.p_hat) <
          (direct.ci_hi - direct.ci_lo) + 0.01);

  // h = infinity convention: tau_h = N2 always
  spec.h = std::numeric_limits<double>::infinity();
  const auto inf_stats = stopping_stats(ModelParams{er}, spec, 200, {32, 0}, 2);
  REQUIRE(inf_stats.tau_h_capped.p_hat == 1.0);
}

TEST_CASE("stopping stats count intersection attribute discoveries") {
  const auto rig = intersection_critical(2000, 1.0);
  const auto spec = lower_tail_spec(ModelParams{rig}, 4.0);
  const auto stats = stopping_stats(ModelParams{rig}, spec, 500, {33, 0}, 2, false);
  REQUIRE(stats.d_exceeds.p_hat == 0.0);  // Chernoff regime
}

TEST_CASE("csv and json export") {
  SECTION("samples csv") {
    std::ostringstream os;
    write_samples_csv(os, {{3, 2}, {1, 5}});
    REQUIRE(os.str() == "replicate,cmax,num_components\n0,3,2\n1,1,5\n");
  }
  SECTION("empty result set keeps the header") {
    std::ostringstream os;
    write_tails_csv(os, {});
    REQUIRE(os.str() == "model,n,A,direction,threshold,hits,reps,p_hat,ci_lo,ci_hi,theorem_bound,vacuous\n");
  }
  SECTION("tails csv row shape") {
    TailEstimate te;
    te.model = "er";
    te.n = 1000;
    te.a = 2.5;
    te.direction = TailDirection::upper;
    te.threshold = 250;
    te.hits = 7;
    te.reps = 100;
    te.p_hat = 0.07;
    te.ci_lo = 0.03;
    te.ci_hi = 0.14;
    te.theorem_bound = 0.5;
    te.vacuous = false;
    std::ostringstream os;
    write_tails_csv(os, {te});
    const auto text = os.str();
    REQUIRE(text.find("er,1000,2.5,upper,250,7,100,0.07,0.03,0.14,0.5,0\n") != std::string::npos);
  }
  SECTION("scaling csv") {
    ScalingFit fit;
    fit.ns = {10, 20, 40, 80};
    fit.medians = {1.5, 2.0, 4.0, 8.0};
    fit.reps = 5;
    std::ostringstream os;
    write_scaling_csv(os, fit);
    REQUIRE(os.str() == "n,median_cmax,reps\n10,1.5,5\n20,2,5\n40,4,5\n80,8,5\n");
  }
  SECTION("json mirrors round-trip") {
    std::ostringstream os;
    write_samples_json(os, {{3, 2}});
    const auto parsed = nlohmann::json::parse(os.str());
    REQUIRE(parsed.is_array());
    REQUIRE(parsed[0]["cmax"] == 3);
    REQUIRE(parsed[0]["num_components"] == 2);

    ScalingFit fit;
    fit.ns = {10, 20, 40, 80};
    fit.medians = {1.0, 2.0, 4.0, 8.0};
    fit.reps = 5;
    const auto done = fit_loglog(fit.ns, fit.medians);
    std::ostringstream os2;
    write_scaling_json(os2, done);
    const auto parsed2 = nlohmann::json::parse(os2.str());
    REQUIRE(parsed2["rows"].size() == 4);
    REQUIRE(parsed2.contains("slope"));
  }
}
