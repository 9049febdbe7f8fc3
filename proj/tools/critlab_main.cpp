// critlab: simulation and verification CLI for largest components in four
// critical random graph models.
//
// Subcommands: simulate, sweep, check-conditions, verify-bounds, oracle, walk.
// Exit codes: 0 pass, 1 usage error, 2 invariant violation, 3 verification
// failure.

#include <chrono>
#include <fstream>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "critlab/bounds.hpp"
#include "critlab/harness.hpp"
#include "critlab/io.hpp"
#include "critlab/models.hpp"
#include "critlab/oracles.hpp"
#include "critlab/walks.hpp"

namespace {

using namespace critlab;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvariant = 2;
constexpr int kExitVerification = 3;

struct ModelFlags {
  std::string model;
  std::uint64_t n = 0;
  std::uint32_t d = 0;
  double beta = 0.0;
  double lambda = 0.0;
  std::uint64_t m = 0;
  double p = -1.0;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f, bool need_n = true) {
  cmd->add_option("--model", f.model, "er|regular|intersection|quantum")
      ->required()
      ->check(CLI::IsMember({"er", "regular", "intersection", "quantum"}));
  auto* n_opt = cmd->add_option("--n", f.n, "vertex count");
  if (need_n) n_opt->required();
  cmd->add_option("--d", f.d, "degree (regular model)");
  cmd->add_option("--beta", f.beta, "beta (intersection: m = floor(beta*n); quantum)");
  cmd->add_option("--lambda", f.lambda, "lambda (quantum model)");
  cmd->add_option("--m", f.m, "attribute count (intersection; overrides --beta)");
  cmd->add_option("--p", f.p, "percolation probability (default: criticality)");
}

// Builds ModelParams with computed criticality defaults; explicit off-critical
// values are allowed and reported.
ModelParams build_model(const ModelFlags& f, std::vector<std::string>& notes) {
  if (f.model == "er") {
    ErParams er = er_critical(f.n);
    if (f.p >= 0.0 && f.p != er.p) {
      er.p = f.p;
      notes.push_back("p off criticality (critical p = 1/n)");
    }
    validate(er);
    return er;
  }
  if (f.model == "regular") {
    if (f.d == 0) throw CLI::ValidationError("--d is required for --model regular");
    RegParams reg = regular_critical(f.n, f.d);
    if (f.p >= 0.0 && f.p != reg.p) {
      reg.p = f.p;
      notes.push_back("p off criticality (critical p = 1/(d-1))");
    }
    validate(reg);
    return reg;
  }
  if (f.model == "intersection") {
    const double beta = f.beta > 0.0 ? f.beta : 1.0;
    IntersectionParams rig;
    rig.n = f.n;
    rig.beta = beta;
    rig.m = f.m > 0 ? f.m
                    : static_cast<std::uint64_t>(std::floor(beta * static_cast<double>(f.n)));
    if (rig.m < 1) throw CLI::ValidationError("intersection: m must be >= 1");
    const double crit_p = 1.0 / std::sqrt(static_cast<double>(rig.n) * static_cast<double>(rig.m));
    rig.p = f.p >= 0.0 ? f.p : crit_p;
    if (f.p >= 0.0 && f.p != crit_p) notes.push_back("p off criticality (critical p = 1/sqrt(nm))");
    validate(rig);
    return rig;
  }
  QuantumParams q;
  q.n = f.n;
  q.lambda = f.lambda > 0.0 ? f.lambda : 1.0;
  q.beta = f.beta > 0.0 ? f.beta : critical_beta(q.lambda);
  q.theta = q.lambda * q.beta;
  validate(q);
  if (std::fabs(F_eval(q.beta, q.lambda) - 1.0) > 1e-9)
    notes.push_back("(beta, lambda) off the critical curve F(beta,lambda)=1");
  return q;
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> grid;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    const auto comma = csv.find(',', pos);
    const auto token = csv.substr(pos, comma == std::string::npos ? csv.size() - pos : comma - pos);
    grid.push_back(std::stod(token));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (grid.empty()) throw CLI::ValidationError("empty grid");
  return grid;
}


// Flat key=value configuration files: '#' comments, blank lines ignored,
// command-line flags override the file, unknown keys fall through to the
// normal parser and are rejected there.  Expanded before parsing.
std::vector<std::string> expand_config_args(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;
  std::ifstream is(path);
  if (!is) throw CLI::ValidationError("cannot open config file: " + path);
  const auto trim = [](std::string s2) {
    const auto b = s2.find_first_not_of(" \t");
    const auto e = s2.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s2.substr(b, e - b + 1);
  };
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("config line is not key=value: " + line);
    const std::string key = "--" + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    bool already = false;
    for (const auto& a : args)
      if (a == key || a.rfind(key + "=", 0) == 0) already = true;
    if (already) continue;  // flags override the file
    if (value == "true") {
      args.push_back(key);
    } else if (value == "false") {
      continue;
    } else {
      args.push_back(key);
      args.push_back(value);
    }
  }
  return args;
}

void print_notes(const std::vector<std::string>& notes) {
  for (const auto& note : notes) std::cout << "note: " << note << "\n";
}

// --------------------------------------------------------------------------
// simulate
// --------------------------------------------------------------------------

struct SimulateArgs {
  ModelFlags model;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
  std::string format = "csv";
  std::string dump_trace;
};

int run_simulate(const SimulateArgs& args) {
  std::vector<std::string> notes;
  const ModelParams model = build_model(args.model, notes);
  print_notes(notes);

  ExperimentConfig cfg;
  cfg.model = model;
  cfg.replicates = args.replicates;
  cfg.seed = {args.seed, 0};
  cfg.threads = args.threads;
  const auto start = std::chrono::steady_clock::now();
  const auto samples = run_replicates(cfg);
  const auto secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!args.dump_trace.empty()) {
    // one recorded exploration (stream of replicate 0); U = n - t - R for the
    // vertex-consuming models, unseen stubs for the configuration model
    Stream rng(args.seed, 0);
    ExploreOptions opt;
    opt.record_path = true;
    ExcursionTrace trace;
    std::int64_t u0 = static_cast<std::int64_t>(model_n(model));
    if (const auto* er = std::get_if<ErParams>(&model)) {
      ErStepper st(*er);
      trace = run_exploration(st, rng, opt);
    } else if (const auto* reg = std::get_if<RegParams>(&model)) {
      ConfigStepper st(*reg, rng);
      trace = run_exploration(st, rng, opt);
      u0 = static_cast<std::int64_t>(reg->n * reg->d);
    } else if (const auto* rig = std::get_if<IntersectionParams>(&model)) {
      IntersectionStepper st(*rig);
      trace = run_exploration(st, rng, opt);
    } else {
      QuantumReducedStepper st(std::get<QuantumParams>(model));
      trace = run_exploration(st, rng, opt);
    }
    auto os = open_output(args.dump_trace);
    const bool stub_clock = std::holds_alternative<RegParams>(model);
    for (std::size_t t = 1; t < trace.rs.size(); ++t) {
      const std::int64_t r = trace.rs[t];
      const std::int64_t consumed = stub_clock ? 2 * static_cast<std::int64_t>(t)
                                               : static_cast<std::int64_t>(t);
      os << t << '\t' << trace.etas[t - 1] << '\t' << r << '\t' << (u0 - consumed - r) << '\n';
    }
  }

  if (!args.out.empty()) {
    auto os = open_output(args.out);
    if (parse_format(args.format) == OutputFormat::csv)
      write_samples_csv(os, samples);
    else
      write_samples_json(os, samples);
  }

  std::vector<std::uint64_t> cmax;
  cmax.reserve(samples.size());
  std::uint64_t max_seen = 0;
  for (const auto& s : samples) {
    cmax.push_back(s.cmax);
    max_seen = std::max(max_seen, s.cmax);
  }
  std::cout << "model=" << model_name(model) << " n=" << model_n(model)
            << " replicates=" << samples.size() << " median_cmax=" << fmt_double(median(cmax))
            << " max_cmax=" << max_seen << " seconds=" << fmt_double(secs) << "\n";
  return kExitOk;
}

// --------------------------------------------------------------------------
// sweep
// --------------------------------------------------------------------------

struct SweepArgs {
  SimulateArgs sim;
  std::string a_grid = "2,4,8";
  std::string direction = "lower";
};

int run_sweep(const SweepArgs& args) {
  std::vector<std::string> notes;
  const ModelParams model = build_model(args.sim.model, notes);
  print_notes(notes);

  ExperimentConfig cfg;
  cfg.model = model;
  cfg.replicates = args.sim.replicates;
  cfg.seed = {args.sim.seed, 0};
  cfg.threads = args.sim.threads;
  const auto samples = run_replicates(cfg);
  const auto grid = parse_grid(args.a_grid);

  std::vector<TailEstimate> rows;
  bool decay_failed = false;
  const auto run_direction = [&](TailDirection dir) {
    auto ests = tail_estimates(samples, model, grid, dir);
    const double gamma = dir == TailDirection::lower ? 0.5 : 1.5;
    const auto decay = decay_check(ests, gamma);
    std::cout << direction_name(dir) << " decay check (gamma=" << fmt_double(gamma)
              << "): " << (decay.conclusive ? (decay.pass ? "pass" : "FAIL") : "inconclusive")
              << "\n";
    for (const auto& pair : decay.pairs)
      std::cout << "  A " << fmt_double(pair.a_lo) << " -> " << fmt_double(pair.a_hi)
                << ": ratio_lo=" << fmt_double(pair.observed_ratio_lo)
                << " target=" << fmt_double(pair.target) << (pair.pass ? " ok" : " VIOLATION")
                << "\n";
    if (decay.conclusive && !decay.pass) decay_failed = true;
    for (auto& e : ests) rows.push_back(std::move(e));
  };
  if (args.direction == "lower" || args.direction == "both") run_direction(TailDirection::lower);
  if (args.direction == "upper" || args.direction == "both") run_direction(TailDirection::upper);

  if (!args.sim.out.empty()) {
    auto os = open_output(args.sim.out);
    if (parse_format(args.sim.format) == OutputFormat::csv)
      write_tails_csv(os, rows);
    else
      write_tails_json(os, rows);
  }
  for (const auto& r : rows)
    std::cout << r.model << " A=" << fmt_double(r.a) << " dir=" << direction_name(r.direction)
              << " p_hat=" << fmt_double(r.p_hat) << " ci=[" << fmt_double(r.ci_lo) << ","
              << fmt_double(r.ci_hi) << "] bound=" << fmt_double(r.theorem_bound)
              << (r.vacuous ? " (vacuous)" : "") << "\n";
  return decay_failed ? kExitVerification : kExitOk;
}

// --------------------------------------------------------------------------
// check-conditions
// --------------------------------------------------------------------------

struct CheckArgs {
  ModelFlags model;
  double a = 4.0;
};

int run_check_conditions(const CheckArgs& args) {
  std::vector<std::string> notes;
  const ModelParams model = build_model(args.model, notes);
  print_notes(notes);
  const auto spec = lower_tail_spec(model, args.a);
  const auto rep = check_conditions(model, spec);
  std::cout << rep.violations.size() << " violations over " << rep.grid << " ("
            << rep.states_checked << " states)\n";
  for (const auto& v : rep.violations)
    std::cout << "  t=" << v.t << " R=" << v.r << " " << v.quantity
              << ": value=" << fmt_double(v.value) << " bound=" << fmt_double(v.bound) << "\n";
  const auto hypo = spec.hypothesis_violations();
  for (const auto& hv : hypo) std::cout << "hypothesis: " << hv << "\n";
  ordered_json out{{"model", kind_name(rep.model)},
                   {"violations", rep.violations.size()},
                   {"states_checked", rep.states_checked},
                   {"hypothesis_violations", hypo},
                   {"pass", rep.pass}};
  std::cout << out.dump() << "\n";
  return rep.pass ? kExitOk : kExitVerification;
}

// --------------------------------------------------------------------------
// verify-bounds
// --------------------------------------------------------------------------

int run_verify_bounds(const CheckArgs& args) {
  std::vector<std::string> notes;
  const ModelParams model = build_model(args.model, notes);
  print_notes(notes);
  const auto spec = lower_tail_spec(model, args.a);
  bool all_ok = true;
  const auto line = [&](const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "[pass] " : "[FAIL] ") << name << ": " << detail << "\n";
    all_ok = all_ok && ok;
  };

  std::cout << "bound spec: c0=" << fmt_double(spec.c0) << " sigma2=" << fmt_double(spec.sigma2)
            << " eps1=" << fmt_double(spec.eps1) << " eps2=" << fmt_double(spec.eps2)
            << " c1=" << fmt_double(spec.c1) << " eps3=" << fmt_double(spec.eps3)
            << " h=" << fmt_double(spec.h) << " T=" << spec.T << " T'=" << spec.T_prime
            << " z=" << fmt_double(spec.z) << "\n";
  const auto hypo = spec.hypothesis_violations();
  std::cout << "h window: [" << fmt_double(spec.h_window_lo()) << ", "
            << fmt_double(spec.h_window_hi()) << "]"
            << (hypo.empty() ? " (hypotheses hold)" : " (hypotheses violated, reported below)")
            << "\n";
  for (const auto& hv : hypo) std::cout << "  hypothesis: " << hv << "\n";

  const auto lower = lower_tail_bound(model, args.a);
  std::cout << "lower-tail bound: " << fmt_double(lower.value)
            << (lower.vacuous ? " (vacuous)" : "") << "\n";
  const auto upper = upper_tail_bound(model, args.a);
  std::cout << "upper-tail bound at the same A: " << fmt_double(upper.value)
            << (upper.vacuous ? " (vacuous)" : "") << "\n";
  if (!std::holds_alternative<QuantumParams>(model)) {
    const auto c = upper_tail_constant(model);
    std::cout << "upper-tail constant: c*=" << fmt_double(c.c_star)
              << " paper=" << fmt_double(c.paper_printed) << " P(X=2)=" << fmt_double(c.prob_r_plus_1)
              << " Var=" << fmt_double(c.variance) << "\n";
  }

  // contract self-checks
  {
    bool ok = true;
    for (const std::uint64_t n : {20ull, 100ull}) {
      for (const double q : {0.2, 0.5}) {
        const double x = 0.2 * static_cast<double>(n);
        double tail = 0.0;
        for (std::uint64_t k = 0; k <= n; ++k) {
          if (static_cast<double>(k) < static_cast<double>(n) * q + x) continue;
          tail += std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k) +
                           static_cast<double>(k) * std::log(q) +
                           static_cast<double>(n - k) * std::log1p(-q));
        }
        ok = ok && tail <= chernoff_binomial(n, q, x) + 1e-12;
      }
    }
    line("chernoff dominates exact binomial tails", ok, "grid of (N,q,x)");
  }
  if (std::holds_alternative<ErParams>(model) || std::holds_alternative<RegParams>(model)) {
    const auto law = std::holds_alternative<ErParams>(model)
                         ? er_dominating_law(model_n(model))
                         : regular_dominating_law(std::get<RegParams>(model).d);
    const auto curve = positivity_prob_curve(law, 1, 2000);
    bool ok = true;
    for (std::uint64_t k = 1; k <= 2000; k = k < 8 ? k + 1 : k * 2)
      ok = ok && curve[k - 1] <= survival_bound(law, 1, k);
    line("walk DP dominated by the survival bound", ok, "k in [1, 2000]");
  }
  if (std::holds_alternative<QuantumParams>(model)) {
    const auto& q = std::get<QuantumParams>(model);
    const bool ok = std::fabs(F_eval(q.beta, q.lambda) - 1.0) < 1e-6;
    line("criticality F(beta,lambda)=1", ok, "|F-1| = " +
             fmt_double(std::fabs(F_eval(q.beta, q.lambda) - 1.0)));
    const auto dec = quantum_upper_decomposition(q, std::max<std::uint64_t>(spec.T, 2));
    std::cout << "upper decomposition at T=" << std::max<std::uint64_t>(spec.T, 2)
              << ": main=" << fmt_double(dec.main_term) << " error=" << fmt_double(dec.error_term)
              << " total=" << fmt_double(dec.total) << "\n";
  }

  ordered_json out{{"model", kind_name(spec.model)},
                   {"A", args.a},
                   {"h", spec.h},
                   {"T", spec.T},
                   {"T_prime", spec.T_prime},
                   {"hypotheses_ok", hypo.empty()},
                   {"lower_bound", lower.value},
                   {"lower_vacuous", lower.vacuous},
                   {"upper_bound", upper.value},
                   {"upper_vacuous", upper.vacuous},
                   {"contracts_ok", all_ok}};
  std::cout << out.dump() << "\n";
  return all_ok ? kExitOk : kExitVerification;
}

// --------------------------------------------------------------------------
// oracle
// --------------------------------------------------------------------------

struct OracleArgs {
  std::string model = "er";
  std::uint64_t n = 4;
  std::uint32_t d = 3;
  std::uint64_t m = 0;
  double p = 0.25;
  std::uint64_t replicates = 1000000;
  double tv_threshold = 0.01;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out;
  std::string pmf_out;
  std::string empirical_out;
};

int run_oracle(const OracleArgs& args) {
  ExactPmf exact;
  std::vector<std::uint64_t> samples(args.replicates);
  if (args.model == "er") {
    exact = er_exact(args.n, args.p);
    parallel_for_index(args.replicates, args.threads, [&](std::uint64_t i) {
      Stream rng(args.seed, i);
      samples[i] = cmax_sample(ErParams{args.n, args.p}, rng).cmax;
    });
  } else if (args.model == "config") {
    exact = config_exact(args.n, args.d, args.p).multigraph;
    parallel_for_index(args.replicates, args.threads, [&](std::uint64_t i) {
      Stream rng(args.seed, i);
      samples[i] = cmax_sample(RegParams{args.n, args.d, args.p}, rng).cmax;
    });
  } else if (args.model == "intersection") {
    const std::uint64_t m = args.m > 0 ? args.m : args.n;
    exact = intersection_exact(args.n, m, args.p);
    parallel_for_index(args.replicates, args.threads, [&](std::uint64_t i) {
      Stream rng(args.seed, i);
      samples[i] = cmax_sample(IntersectionParams{args.n, m, 1.0, args.p}, rng).cmax;
    });
  } else if (args.model == "quantum") {
    // no-holes diagnostic mode: equivalent to G(n, p) with
    // p = 1 - e^{-theta/(lambda n)}
    exact = er_exact(args.n, args.p);
    const double theta = -static_cast<double>(args.n) * std::log1p(-args.p);
    const QuantumParams q{theta, 1.0, theta, args.n};
    parallel_for_index(args.replicates, args.threads, [&](std::uint64_t i) {
      Stream rng(args.seed, i);
      samples[i] = quantum_direct(q, rng, false).cmax;
    });
  } else {
    throw CLI::ValidationError("oracle: unknown model " + args.model);
  }
  const auto empirical = pmf_from_samples(samples);
  const double tv = tv_distance(empirical, exact);
  const bool pass = tv < args.tv_threshold;
  std::cout << "model=" << args.model << " n=" << args.n << " replicates=" << args.replicates
            << " tv=" << fmt_double(tv) << " threshold=" << fmt_double(args.tv_threshold) << " "
            << (pass ? "pass" : "FAIL") << "\n";
  ordered_json out{{"model", args.model},
                   {"n", args.n},
                   {"tv", tv},
                   {"threshold", args.tv_threshold},
                   {"pass", pass}};
  std::cout << out.dump() << "\n";
  if (!args.out.empty()) {
    auto os = open_output(args.out);
    os << out.dump(2) << '\n';
  }
  if (!args.pmf_out.empty()) {
    auto os = open_output(args.pmf_out);
    write_pmf_csv(os, exact);
  }
  if (!args.empirical_out.empty()) {
    auto os = open_output(args.empirical_out);
    write_pmf_csv(os, empirical);
  }
  return pass ? kExitOk : kExitVerification;
}

// --------------------------------------------------------------------------
// walk
// --------------------------------------------------------------------------

struct WalkArgs {
  std::string law = "bin2";
  bool ballot = false;
  bool dp = false;
  bool bound = false;
  bool simulate = false;
  std::uint64_t r = 1;
  std::uint64_t k = 10;
  double a = 0.0;
  int n = 6;
  std::uint64_t reps = 100000;
  std::uint64_t seed = 1;
};

IncrementLaw law_by_name(const std::string& name) {
  if (name == "fair") return IncrementLaw::fair_pm1();
  if (name == "bin2") return IncrementLaw::binomial_rational(2, 1, 2);
  if (name == "poisson1") return IncrementLaw::poisson(1.0);
  throw CLI::ValidationError("walk: unknown law " + name);
}

int run_walk(const WalkArgs& args) {
  const auto law = law_by_name(args.law);
  bool failed = false;
  if (args.dp) {
    const double v = positivity_prob_dp(law, args.r, args.k);
    std::cout << "dp survival P(r+S_t>0, t<=" << args.k << ") = " << fmt_double(v) << "\n";
  }
  if (args.bound) {
    const auto rep = walk_bound_report(law, args.r, args.k);
    std::cout << "k=" << rep.k << " exact=" << fmt_double(rep.exact_prob)
              << " bound=" << fmt_double(rep.bound) << " slack=" << fmt_double(rep.slack) << "\n";
    if (rep.slack < 0.0) failed = true;
  }
  if (args.simulate) {
    const auto est = simulate_survival(law, args.r, args.k, args.reps, {args.seed, 0});
    const double dp_value = positivity_prob_dp(law, args.r, args.k);
    const bool inside = est.contains(dp_value);
    std::cout << "simulate p_hat=" << fmt_double(est.p_hat) << " ci=[" << fmt_double(est.ci_lo)
              << "," << fmt_double(est.ci_hi) << "] dp=" << fmt_double(dp_value) << " "
              << (inside ? "pass" : "FAIL") << "\n";
    if (!inside) failed = true;
  }
  if (args.ballot) {
    const auto rep = ballot_check(law, static_cast<int>(args.r), args.a, args.n);
    std::cout << "ballot n=" << args.n << " a=" << fmt_double(args.a) << " r=" << args.r << ": "
              << (rep.pass ? "all j pass" : "VIOLATIONS") << " (max ratio "
              << fmt_double(rep.max_ratio) << ", " << (rep.exact_arithmetic ? "exact" : "double")
              << " arithmetic)\n";
    if (!rep.pass) failed = true;
  }
  if (!args.dp && !args.bound && !args.simulate && !args.ballot)
    throw CLI::ValidationError("walk: choose at least one of --dp/--bound/--simulate/--ballot");
  return failed ? kExitVerification : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critical random graph simulation laboratory"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "sample |C_max| over replicates");
  add_model_flags(simulate, sim.model);
  simulate->add_option("--replicates", sim.replicates, "number of replicates")->required();
  simulate->add_option("--seed", sim.seed, "root seed")->required();
  simulate->add_option("--threads", sim.threads, "worker threads")->envname("CRITLAB_THREADS");
  simulate->add_option("--out", sim.out, "output file for samples");
  simulate->add_option("--format", sim.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  simulate->add_option("--dump-trace", sim.dump_trace,
                       "write one exploration trace (t, eta, R, U per line)");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "tail estimates over an A grid");
  add_model_flags(sweep_cmd, sweep.sim.model);
  sweep_cmd->add_option("--replicates", sweep.sim.replicates)->required();
  sweep_cmd->add_option("--seed", sweep.sim.seed)->required();
  sweep_cmd->add_option("--threads", sweep.sim.threads)->envname("CRITLAB_THREADS");
  sweep_cmd->add_option("--out", sweep.sim.out);
  sweep_cmd->add_option("--format", sweep.sim.format)->check(CLI::IsMember({"csv", "json"}));
  sweep_cmd->add_option("--a-grid", sweep.a_grid, "comma-separated A values");
  sweep_cmd->add_option("--direction", sweep.direction, "lower|upper|both")
      ->check(CLI::IsMember({"lower", "upper", "both"}));

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check-conditions", "verify moment conditions on the grid");
  add_model_flags(check_cmd, check.model);
  check_cmd->add_option("--A", check.a, "tail level A");

  CheckArgs verify;
  auto* verify_cmd = app.add_subcommand("verify-bounds", "bound tables and contract checks");
  add_model_flags(verify_cmd, verify.model);
  verify_cmd->add_option("--A", verify.a, "tail level A");

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "compare a sampler against exact enumeration");
  oracle_cmd->add_option("--model", oracle.model, "er|config|intersection|quantum")
      ->required()
      ->check(CLI::IsMember({"er", "config", "intersection", "quantum"}));
  oracle_cmd->add_option("--n", oracle.n)->required();
  oracle_cmd->add_option("--d", oracle.d);
  oracle_cmd->add_option("--m", oracle.m);
  oracle_cmd->add_option("--p", oracle.p)->required();
  oracle_cmd->add_option("--replicates", oracle.replicates);
  oracle_cmd->add_option("--tv-threshold", oracle.tv_threshold);
  oracle_cmd->add_option("--seed", oracle.seed);
  oracle_cmd->add_option("--threads", oracle.threads)->envname("CRITLAB_THREADS");
  oracle_cmd->add_option("--out", oracle.out, "JSON verdict file");
  oracle_cmd->add_option("--pmf-out", oracle.pmf_out, "exact pmf as size,prob CSV");
  oracle_cmd->add_option("--empirical-out", oracle.empirical_out, "empirical pmf CSV");

  WalkArgs walk;
  auto* walk_cmd = app.add_subcommand("walk", "walk DP, ballot and bound utilities");
  walk_cmd->add_option("--law", walk.law, "fair|bin2|poisson1");
  walk_cmd->add_flag("--ballot", walk.ballot, "exhaustive ballot-inequality check");
  walk_cmd->add_flag("--dp", walk.dp, "exact survival probability");
  walk_cmd->add_flag("--bound", walk.bound, "survival bound report");
  walk_cmd->add_flag("--simulate", walk.simulate, "Monte Carlo survival with CI");
  walk_cmd->add_option("--r", walk.r, "start level");
  walk_cmd->add_option("--k", walk.k, "horizon");
  walk_cmd->add_option("--a", walk.a, "ballot barrier");
  walk_cmd->add_option("--n", walk.n, "ballot horizon");
  walk_cmd->add_option("--reps", walk.reps);
  walk_cmd->add_option("--seed", walk.seed);

  std::string config_path_doc;
  for (auto* cmd : {simulate, sweep_cmd, check_cmd, verify_cmd, oracle_cmd, walk_cmd})
    cmd->add_option("--config", config_path_doc,
                    "flat key=value configuration file (flags override)");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config_args(std::move(args));
    std::vector<const char*> cargv;
    cargv.push_back(argv[0]);
    for (const auto& a : args) cargv.push_back(a.c_str());
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (sweep_cmd->parsed()) return run_sweep(sweep);
    if (check_cmd->parsed()) return run_check_conditions(check);
    if (verify_cmd->parsed()) return run_verify_bounds(verify);
    if (oracle_cmd->parsed()) return run_oracle(oracle);
    if (walk_cmd->parsed()) return run_walk(walk);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const critlab::invariant_error& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitUsage;
}
