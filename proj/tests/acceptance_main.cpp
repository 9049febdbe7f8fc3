// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fails.  Usage: acceptance [--cli PATH] [--threads N] [criterion ids...]

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "critlab/bounds.hpp"
#include "critlab/harness.hpp"
#include "critlab/models.hpp"
#include "critlab/oracles.hpp"
#include "critlab/walks.hpp"

using namespace critlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

unsigned g_threads = 8;
std::string g_cli_path;

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<std::uint64_t> cmax_of(const std::vector<ReplicateSample>& samples) {
  std::vector<std::uint64_t> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.cmax);
  return out;
}

std::vector<ReplicateSample> sample_model(const ModelParams& model, std::uint64_t reps,
                                          std::uint64_t seed, unsigned threads) {
  ExperimentConfig cfg;
  cfg.model = model;
  cfg.replicates = reps;
  cfg.seed = {seed, 0};
  cfg.threads = threads;
  return run_replicates(cfg);
}

// --------------------------------------------------------------------------

Outcome c1_er_oracle() {
  const auto start = std::chrono::steady_clock::now();
  const auto samples = sample_model(ErParams{4, 0.25}, 1000000, 101, 1);  // single-threaded
  const double secs = seconds_since(start);
  const double tv = tv_distance(pmf_from_samples(cmax_of(samples)), er_exact(4, 0.25, 1, 4));
  std::ostringstream os;
  os << "TV=" << tv << " (<0.005), runtime=" << secs << "s (<60s single-threaded)";
  return {tv < 0.005 && secs < 60.0, os.str()};
}

Outcome c2_exploration_equals_unionfind() {
  std::uint64_t mismatches = 0;
  bool roundtrip_ok = true;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    Stream rng(202, i);
    const auto graph = er_materialize({200, 1.0 / 200.0}, rng);
    AdjacencyStepper st(graph);
    Stream unused(0, 0);
    auto trace = run_exploration(st, unused);
    auto sizes = trace.component_sizes;
    std::sort(sizes.begin(), sizes.end());
    if (sizes != components_unionfind(graph.n, graph)) ++mismatches;
    if (i == 0) {
      std::stringstream buf;
      write_edge_list(buf, graph);
      const auto back = read_edge_list(buf);
      roundtrip_ok = back.n == graph.n && back.edges == graph.edges;
    }
  }
  std::ostringstream os;
  os << mismatches << "/1000 instances mismatched (need 0); edge-list round-trip "
     << (roundtrip_ok ? "ok" : "broken");
  return {mismatches == 0 && roundtrip_ok, os.str()};
}

Outcome c3_config_oracle() {
  const std::uint64_t reps = 1000000;
  std::vector<std::uint8_t> hit(reps, 0);
  parallel_for_index(reps, g_threads, [&](std::uint64_t i) {
    Stream rng(303, i);
    hit[i] = cmax_sample(RegParams{2, 3, 0.5}, rng).cmax == 2 ? 1 : 0;
  });
  std::uint64_t hits = 0;
  for (const auto h : hit) hits += h;
  const auto est = wilson(hits, reps);
  std::ostringstream os;
  os << "P(|Cmax|=2) in [" << est.ci_lo << ", " << est.ci_hi << "], enumeration value 0.65";
  return {est.contains(0.65), os.str()};
}

Outcome c4_intersection_oracle() {
  const auto oracle = intersection_exact(4, 4, 0.3, 3, 10);
  const std::uint64_t reps = 1000000;
  std::vector<std::uint64_t> lazy(reps), mat(reps);
  parallel_for_index(reps, g_threads, [&](std::uint64_t i) {
    Stream rng(404, i);
    lazy[i] = cmax_sample(IntersectionParams{4, 4, 1.0, 0.3}, rng).cmax;
    Stream rng2(405, i);
    mat[i] = intersection_materialize({4, 4, 1.0, 0.3}, rng2).back();
  });
  const auto pmf_lazy = pmf_from_samples(lazy);
  const auto pmf_mat = pmf_from_samples(mat);
  const double tv_l = tv_distance(pmf_lazy, oracle);
  const double tv_m = tv_distance(pmf_mat, oracle);
  const double tv_x = tv_distance(pmf_lazy, pmf_mat);
  std::ostringstream os;
  os << "TV(lazy,exact)=" << tv_l << " TV(mat,exact)=" << tv_m << " (<0.01), TV(lazy,mat)="
     << tv_x << " (<0.005)";
  return {tv_l < 0.01 && tv_m < 0.01 && tv_x < 0.005, os.str()};
}

Outcome c5_quantum_degenerate() {
  const double p = 0.25;
  const std::uint64_t n = 4;
  const double theta = -static_cast<double>(n) * std::log1p(-p);  // lambda = 1
  const QuantumParams q{theta, 1.0, theta, n};
  const std::uint64_t reps = 1000000;
  std::vector<std::uint64_t> samples(reps);
  parallel_for_index(reps, g_threads, [&](std::uint64_t i) {
    Stream rng(505, i);
    samples[i] = quantum_direct(q, rng, false).cmax;
  });
  const double tv = tv_distance(pmf_from_samples(samples), er_exact(n, p, 1, 4));

  bool means_ok = true;
  std::ostringstream means;
  for (const double th : {0.5, 1.0, 2.0, 5.0}) {
    Welford w;
    Stream rng(506, static_cast<std::uint64_t>(th * 100));
    for (std::uint64_t i = 0; i < 1000000; ++i) w.add(cut_gamma({th}, rng));
    const bool ok = std::fabs(w.mean - cut_gamma_mean(th)) < 3.0 * w.stderr_mean();
    means_ok = means_ok && ok;
    means << " F(" << th << ")" << (ok ? "+" : "-");
  }
  std::ostringstream os;
  os << "no-holes TV=" << tv << " (<0.01); cut-gamma means vs F(theta):" << means.str();
  return {tv < 0.01 && means_ok, os.str()};
}

struct ModelCase {
  std::string name;
  ModelParams params;
};

std::vector<ModelCase> acceptance_models() {
  return {{"er", ErParams{10000, 1e-4}},
          {"regular", regular_critical(10000, 3)},
          {"intersection", intersection_critical(10000, 1.0)},
          {"quantum", quantum_critical(4000, 1.0)}};
}

Outcome c6_lower_decay() {
  std::ostringstream os;
  bool all_pass = true;
  for (const auto& mc : acceptance_models()) {
    const auto start = std::chrono::steady_clock::now();
    const auto samples = sample_model(mc.params, 20000, 606, g_threads);
    const auto ests = tail_estimates(samples, mc.params, {2.0, 4.0, 8.0}, TailDirection::lower);
    const auto decay = decay_check(ests, 0.5);
    const double secs = seconds_since(start);
    const bool ok = decay.conclusive && decay.pass && secs < 1800.0;
    all_pass = all_pass && ok;
    os << mc.name << "(" << (ok ? "pass" : "FAIL") << " " << static_cast<int>(secs) << "s:";
    for (const auto& e : ests) os << " " << e.p_hat;
    os << ") ";
  }
  return {all_pass, os.str()};
}

Outcome c7_upper_decay() {
  std::ostringstream os;
  bool all_pass = true;
  for (const auto& mc : acceptance_models()) {
    const auto samples = sample_model(mc.params, 100000, 707, g_threads);
    // the stated grid, plus A=8 where the theorem bound is non-vacuous
    const auto ests =
        tail_estimates(samples, mc.params, {1.0, 1.5, 2.0, 3.0, 8.0}, TailDirection::upper);
    std::vector<TailEstimate> stated(ests.begin(), ests.begin() + 4);
    const auto decay = decay_check(stated, 1.5);
    bool bound_ok = true;
    for (const auto& e : ests) {
      if (!e.vacuous && !(e.p_hat <= e.theorem_bound)) bound_ok = false;
    }
    const bool ok = decay.conclusive && decay.pass && bound_ok;
    all_pass = all_pass && ok;
    os << mc.name << "(" << (ok ? "pass" : "FAIL") << ":";
    for (const auto& e : stated) os << " " << e.p_hat;
    os << " | bound@A=8 " << ests.back().p_hat << "<=" << ests.back().theorem_bound << ")";
    if (!(decay.conclusive && decay.pass) && std::holds_alternative<RegParams>(mc.params)) {
      // the d=3 cluster scale is ~2^{2/3} n^{2/3} (offspring variance 1/2),
      // so A in {1, 1.5} samples the bulk; the tail shape holds on the
      // scale-shifted grid, reported as a supplement
      const auto shifted =
          tail_estimates(samples, mc.params, {1.6, 2.4, 3.6, 5.4}, TailDirection::upper);
      const auto shifted_decay = decay_check(shifted, 1.5);
      os << " [supplement: grid x1.6 "
         << (shifted_decay.conclusive && shifted_decay.pass ? "passes" : "FAILS") << ":";
      for (const auto& e : shifted) os << " " << e.p_hat;
      os << "; stated-grid verdict kept, see decisions ledger]";
    }
    os << " ";
  }
  return {all_pass, os.str()};
}

Outcome c8_scaling() {
  const std::vector<std::uint64_t> grid{4096, 8192, 16384, 32768, 65536, 131072};
  const auto fit = scaling_exponent([](std::uint64_t n) { return ModelParams{er_critical(n)}; },
                                    grid, 2000, {808, 0}, g_threads);
  std::ostringstream os;
  os << "slope=" << fit.slope << " (need [0.61, 0.72]), stderr=" << fit.stderr_slope;
  return {fit.slope >= 0.61 && fit.slope <= 0.72, os.str()};
}

Outcome c9_walk_dp() {
  const auto law = IncrementLaw::binomial_rational(2, 1, 2);
  const bool exact1 = positivity_prob_dp(law, 1, 1) == 0.75;
  const bool exact2 = positivity_prob_dp(law, 1, 2) == 0.625;
  const auto est = simulate_survival(law, 1, 2, 1000000, {909, 0});
  std::ostringstream os;
  os << "dp(k=1)=" << positivity_prob_dp(law, 1, 1) << " dp(k=2)=" << positivity_prob_dp(law, 1, 2)
     << " (exact), CI [" << est.ci_lo << "," << est.ci_hi << "] contains 0.625: "
     << (est.contains(0.625) ? "yes" : "no");
  return {exact1 && exact2 && est.contains(0.625), os.str()};
}

Outcome c10_ballot_exhaustive() {
  std::uint64_t checks = 0, violations = 0;
  bool all_exact = true;
  for (const auto& law : {IncrementLaw::fair_pm1(), IncrementLaw::binomial_rational(2, 1, 2)}) {
    for (int n = 1; n <= 12; ++n) {
      for (const double a : {0.0, 1.0, 2.0}) {
        const auto rep = ballot_check(law, 1, a, n);
        ++checks;
        if (!rep.pass) ++violations;
        all_exact = all_exact && rep.exact_arithmetic;
      }
    }
  }
  std::ostringstream os;
  os << violations << " violations in " << checks << " configurations (exact arithmetic: "
     << (all_exact ? "all" : "NOT all") << ")";
  return {violations == 0 && all_exact, os.str()};
}

Outcome c11_survival_domination() {
  std::uint64_t violations = 0;
  for (const auto& law : {er_dominating_law(10000), regular_dominating_law(3)}) {
    const auto curve = positivity_prob_curve(law, 1, 10000);
    for (std::uint64_t k = 1; k <= 10000; ++k)
      if (curve[k - 1] > survival_bound(law, 1, k)) ++violations;
  }
  std::ostringstream os;
  os << violations << " violations over k in [1,10^4] on the er and regular dominating laws";
  return {violations == 0, os.str()};
}

Outcome c12_condition_checkers() {
  std::ostringstream os;
  bool pass = true;

  const ErParams er{10000, 1e-4};
  const auto er_rep = check_conditions(ModelParams{er}, lower_tail_spec(ModelParams{er}, 4.0));
  os << "er:" << er_rep.violations.size() << "v ";
  pass = pass && er_rep.pass;

  for (const double beta : {0.5, 1.0, 2.0}) {
    const auto rig = intersection_critical(10000, beta);
    const auto rep = check_conditions(ModelParams{rig}, lower_tail_spec(ModelParams{rig}, 4.0));
    os << "rig(b=" << beta << "):" << rep.violations.size() << "v ";
    pass = pass && rep.pass;
  }

  // 10^4 instrumented configuration traces: couplings, stub counts, the
  // excursion-length relation in its literal and exact (+1) forms
  std::atomic<std::uint64_t> coupling_viol{0}, literal_viol{0}, exact_viol{0}, invariant_viol{0};
  parallel_for_index(10000, g_threads, [&](std::uint64_t i) {
    Stream rng(1212, i);
    const std::uint32_t d = (i % 2 == 0) ? 3 : 4;
    ConfigStepper st({200, d, 1.0 / (d - 1.0)}, rng);
    try {
      const auto trace = run_exploration(
          st, rng, {}, [&](std::uint64_t, std::int64_t eta, std::int64_t) {
            if (st.last().eta_lower > eta) ++coupling_viol;
            return true;
          });
      for (std::size_t e = 0; e < trace.component_sizes.size(); ++e) {
        if (trace.excursion_lengths[e] > (d - 1) * trace.component_sizes[e]) ++literal_viol;
        if (trace.excursion_lengths[e] > (d - 1) * trace.component_sizes[e] + 1) ++exact_viol;
      }
    } catch (const invariant_error&) {
      ++invariant_viol;  // stub-count inequalities are asserted inside the stepper
    }
  });
  os << "couplings:" << coupling_viol << "v stub-counts:" << invariant_viol
     << "v excursion<= (d-1)*vertices:" << literal_viol
     << "v (as stated) / <= (d-1)*vertices+1:" << exact_viol << "v (exact stub balance)";
  pass = pass && coupling_viol == 0 && invariant_viol == 0 && literal_viol == 0 && exact_viol == 0;
  if (literal_viol > 0 && exact_viol == 0)
    os << " -- the literal form is not pathwise-attainable: a fresh-seed excursion whose "
          "pairings are all non-retained has length d = (d-1)*1 + 1; see decisions ledger";
  return {pass, os.str()};
}

Outcome c13_stopping() {
  std::ostringstream os;
  bool pass = true;

  // stated instance: ER n = 10^4 with the published table; the Prop 2.2
  // window (c0+1 <= h) is empty at this n, so the comparison set is vacuous
  const ErParams er4{10000, 1e-4};
  bool any_checked = false;
  for (const double a : {2.0, 4.0, 8.0}) {
    const auto spec = lower_tail_spec(ModelParams{er4}, a);
    const auto stats = stopping_stats(ModelParams{er4}, spec, 10000, {1313, 0}, g_threads);
    if (stats.tau_h_window_ok) {
      any_checked = true;
      if (!(stats.tau_h_capped.p_hat <= stats.tau_h_bound)) pass = false;
    }
  }
  os << "n=10^4: tau_h bound window " << (any_checked ? "checked" : "empty (vacuous, reported)");

  // non-vacuous supplement: n = 10^6, A = 2 has a valid window
  const ErParams er6{1000000, 1e-6};
  const auto spec6 = lower_tail_spec(ModelParams{er6}, 2.0);
  const auto stats6 =
      stopping_stats(ModelParams{er6}, spec6, 10000, {1314, 0}, g_threads, false);
  os << "; n=10^6 A=2: P(tau_h=N2)=" << stats6.tau_h_capped.p_hat
     << " <= Phi=" << stats6.tau_h_bound << " (window "
     << (stats6.tau_h_window_ok ? "valid" : "invalid") << ")";
  pass = pass && stats6.tau_h_window_ok &&
         stats6.tau_h_capped.p_hat <= stats6.tau_h_bound;

  const auto rig = intersection_critical(10000, 1.0);
  const auto spec_rig = lower_tail_spec(ModelParams{rig}, 4.0);
  const auto stats_rig =
      stopping_stats(ModelParams{rig}, spec_rig, 10000, {1315, 0}, g_threads, false);
  os << "; intersection P(D_{T'}>3mpT')=" << stats_rig.d_exceeds.p_hat << " (need 0)";
  pass = pass && stats_rig.d_exceeds.hits == 0;
  return {pass, os.str()};
}

Outcome c14_critical_solver() {
  std::ostringstream os;
  bool pass = true;
  for (const double lambda : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    try {
      const double beta = critical_beta(lambda);
      const double err = std::fabs(F_eval(beta, lambda) - 1.0);
      const bool ok = err < 1e-10 && (lambda != 1.0 || std::fabs(beta - 1.1462) < 1e-3);
      pass = pass && ok;
      os << "lambda=" << lambda << ": beta*=" << beta << " |F-1|=" << err
         << (ok ? " ok; " : " FAIL; ");
    } catch (const std::invalid_argument&) {
      pass = false;
      os << "lambda=" << lambda << ": no root (sup_beta F = 2/lambda = " << 2.0 / lambda
         << " <= 1, criterion infeasible as stated; see decisions ledger); ";
    }
  }
  return {pass, os.str()};
}

int run_cli(const std::string& args) {
  const std::string cmd = g_cli_path + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

Outcome c15_determinism() {
  if (g_cli_path.empty()) return {false, "no --cli path provided"};
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "critlab_acceptance";
  fs::create_directories(dir);
  bool pass = true;
  std::ostringstream os;

  const auto compare_across_threads = [&](const std::string& label, const std::string& base,
                                          const std::string& out_flag) {
    std::vector<std::string> contents;
    for (const unsigned t : {1u, 4u, 8u}) {
      const std::string path = (dir / (label + std::to_string(t))).string();
      const int rc = run_cli(base + " --threads " + std::to_string(t) + " " + out_flag + path);
      if (rc != 0) {
        pass = false;
        os << label << ": exit " << rc << "; ";
        return;
      }
      contents.push_back(slurp(path));
    }
    // and the same invocation repeated
    const std::string path = (dir / (label + "r")).string();
    run_cli(base + " --threads 4 " + out_flag + path);
    contents.push_back(slurp(path));
    const bool same = contents[0] == contents[1] && contents[1] == contents[2] &&
                      contents[0] == contents[3] && !contents[0].empty();
    pass = pass && same;
    os << label << (same ? " byte-identical; " : " DIFFERS; ");
  };

  compare_across_threads("er_samples",
                         "simulate --model er --n 2000 --replicates 2000 --seed 7", "--out ");
  compare_across_threads("reg_samples",
                         "simulate --model regular --n 500 --d 3 --replicates 1000 --seed 8",
                         "--out ");
  compare_across_threads("quantum_json",
                         "simulate --model quantum --n 300 --replicates 500 --seed 9 "
                         "--format json",
                         "--out ");
  compare_across_threads(
      "rig_sweep",
      "sweep --model intersection --n 1000 --replicates 2000 --seed 10 --a-grid 2,4 "
      "--direction both",
      "--out ");

  // flat key=value config file round trip: flags and file must agree
  {
    const std::string cfg_path = (dir / "sim.cfg").string();
    std::ofstream cfg(cfg_path);
    cfg << "# critlab config\nmodel=er\nn=1500\nreplicates=1000\nseed=11\n";
    cfg.close();
    const std::string by_flags = (dir / "byflags.csv").string();
    const std::string by_file = (dir / "byfile.csv").string();
    int rc = run_cli("simulate --model er --n 1500 --replicates 1000 --seed 11 --threads 2 --out " +
                     by_flags);
    rc |= run_cli("simulate --config " + cfg_path + " --threads 2 --out " + by_file);
    const bool same = rc == 0 && slurp(by_flags) == slurp(by_file) && !slurp(by_flags).empty();
    pass = pass && same;
    os << "config-file round trip" << (same ? " ok; " : " DIFFERS; ");
  }
  return {pass, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) {
      g_cli_path = argv[++i];
    } else if (arg == "--threads" && i + 1 < argc) {
      g_threads = static_cast<unsigned>(std::atoi(argv[++i]));
    } else {
      selected.push_back(std::atoi(arg.c_str()));
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"er oracle equivalence (TV, runtime)", c1_er_oracle},
      {"exploration equals union-find per instance", c2_exploration_equals_unionfind},
      {"config-model enumeration oracle", c3_config_oracle},
      {"intersection oracle, lazy and materialized", c4_intersection_oracle},
      {"quantum degenerate mode and cut-gamma means", c5_quantum_degenerate},
      {"theorem-1 decay shape (lower tail, gamma=1/2)", c6_lower_decay},
      {"theorem-2 decay shape (upper tail, gamma=3/2)", c7_upper_decay},
      {"scaling exponent in [0.61, 0.72]", c8_scaling},
      {"walk DP closed values and simulation CI", c9_walk_dp},
      {"ballot estimate exhaustive, zero violations", c10_ballot_exhaustive},
      {"survival-bound domination on k in [1,10^4]", c11_survival_domination},
      {"condition checkers and config invariants", c12_condition_checkers},
      {"stopping-time instrumentation", c13_stopping},
      {"critical curve solver", c14_critical_solver},
      {"CLI determinism across thread counts", c15_determinism},
  };

  int failures = 0;
  const auto total_start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && std::find(selected.begin(), selected.end(), id) == selected.end())
      continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::cout << (outcome.pass ? "[PASS] " : "[FAIL] ") << "criterion " << id << ": "
              << criteria[i].first << " -- " << outcome.detail << " ["
              << static_cast<int>(seconds_since(start)) << "s]" << std::endl;
  }
  std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << " ("
            << static_cast<int>(seconds_since(total_start)) << "s total)" << std::endl;
  return failures == 0 ? 0 : 1;
}
