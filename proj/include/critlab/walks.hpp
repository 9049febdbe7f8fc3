// Random-walk survival machinery: exact dynamic-programming survival
// probabilities, a ballot-type estimate checker, rotation counting and the
// k^{-1/2} survival bound.
//
// An IncrementLaw describes a nonnegative integer variable X; the walk steps
// by X - 1.  Laws built from rational probabilities carry exact integer
// weights so the ballot checker can compare both sides of the inequality in
// integer arithmetic, with no rounding at ties.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <type_traits>
#include <vector>

#include "critlab/common.hpp"
#include "critlab/rng.hpp"
#include "critlab/stats.hpp"

namespace critlab {

struct IncrementLaw {
  std::vector<int> values;   // support of X, all >= 0
  std::vector<double> probs; // sums to 1 within 1e-12 (minus truncation_mass)
  // Optional exact form: probs[i] == weights[i] / weight_den.
  std::vector<std::uint64_t> weights;
  std::uint64_t weight_den = 0;
  // Mass removed when the law was truncated from an unbounded one.
  double truncation_mass = 0.0;

  void validate() const {
    if (values.empty()) throw std::invalid_argument("IncrementLaw: empty support");
    if (values.size() != probs.size())
      throw std::invalid_argument("IncrementLaw: values/probs size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] < 0) throw std::invalid_argument("IncrementLaw: negative value");
      if (!(probs[i] >= 0.0)) throw std::invalid_argument("IncrementLaw: negative prob");
      sum += probs[i];
    }
    if (std::fabs(sum + truncation_mass - 1.0) > 1e-12)
      throw std::invalid_argument("IncrementLaw: probabilities do not sum to 1");
  }

  bool has_exact_weights() const { return weight_den != 0; }

  int max_value() const { return *std::max_element(values.begin(), values.end()); }

  double mean() const {
    KahanSum s;
    for (std::size_t i = 0; i < values.size(); ++i) s.add(values[i] * probs[i]);
    return s.value();
  }

  double variance() const {
    const double m = mean();
    KahanSum s;
    for (std::size_t i = 0; i < values.size(); ++i)
      s.add((values[i] - m) * (values[i] - m) * probs[i]);
    return s.value();
  }

  double prob_of_value(int v) const {
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] == v) return probs[i];
    return 0.0;
  }

  std::uint64_t weight_of_value(int v) const {
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] == v) return weights[i];
    return 0;
  }

  int sample(Stream& rng) const {
    const double u = rng.next_unit();
    double cum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      cum += probs[i];
      if (u < cum) return values[i];
    }
    return values.back();
  }

  static IncrementLaw from_values(std::vector<int> vals, std::vector<double> ps) {
    IncrementLaw law;
    law.values = std::move(vals);
    law.probs = std::move(ps);
    law.validate();
    return law;
  }

  // X in {0, 2} with probability 1/2 each: walk increments are fair +-1.
  static IncrementLaw fair_pm1() {
    IncrementLaw law;
    law.values = {0, 2};
    law.probs = {0.5, 0.5};
    law.weights = {1, 1};
    law.weight_den = 2;
    return law;
  }

  // Bin(n, num/den) with exact rational weights; needs den^n to fit u64.
  static IncrementLaw binomial_rational(int n, std::uint64_t num, std::uint64_t den) {
    if (n < 0 || den == 0 || num > den)
      throw std::invalid_argument("binomial_rational: bad parameters");
    if (n * std::log2(static_cast<double>(den)) > 62.0)
      throw std::invalid_argument("binomial_rational: den^n overflows");
    IncrementLaw law;
    std::uint64_t total = 1;
    for (int i = 0; i < n; ++i) total *= den;
    law.weight_den = total;
    for (int k = 0; k <= n; ++k) {
      unsigned __int128 w = 1;
      for (int i = 0; i < k; ++i) w = w * static_cast<unsigned>(n - i) / static_cast<unsigned>(i + 1);
      for (int i = 0; i < k; ++i) w *= num;
      for (int i = 0; i < n - k; ++i) w *= (den - num);
      law.values.push_back(k);
      law.weights.push_back(static_cast<std::uint64_t>(w));
      law.probs.push_back(static_cast<double>(law.weights.back()) /
                          static_cast<double>(total));
    }
    law.validate();
    return law;
  }

  // Bin(n, p) truncated at the 1 - tail_eps quantile; removed mass is kept as
  // truncation_mass, not renormalized, so DP survival stays a lower bound.
  static IncrementLaw binomial(std::uint64_t n, double p, double tail_eps = 1e-15) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial law: bad p");
    IncrementLaw law;
    if (p == 0.0 || n == 0) {
      law.values = {0};
      law.probs = {1.0};
      return law;
    }
    double pmf = std::exp(static_cast<double>(n) * std::log1p(-p));
    const double odds = p / (1.0 - p);
    double cum = 0.0;
    for (std::uint64_t k = 0; k <= n; ++k) {
      if (k > 0) pmf *= odds * (static_cast<double>(n - k + 1) / static_cast<double>(k));
      law.values.push_back(static_cast<int>(k));
      law.probs.push_back(pmf);
      cum += pmf;
      if (cum >= 1.0 - tail_eps) break;
    }
    law.truncation_mass = std::max(0.0, 1.0 - cum);
    law.validate();
    return law;
  }

  static IncrementLaw poisson(double mu, double tail_eps = 1e-15) {
    if (!(mu >= 0.0)) throw std::invalid_argument("poisson law: bad mu");
    IncrementLaw law;
    if (mu == 0.0) {
      law.values = {0};
      law.probs = {1.0};
      return law;
    }
    double pmf = std::exp(-mu);
    double cum = 0.0;
    for (int k = 0;; ++k) {
      if (k > 0) pmf *= mu / k;
      law.values.push_back(k);
      law.probs.push_back(pmf);
      cum += pmf;
      if (cum >= 1.0 - tail_eps) break;
      if (k > 4000) throw std::invalid_argument("poisson law: truncation did not converge");
    }
    law.truncation_mass = std::max(0.0, 1.0 - cum);
    law.validate();
    return law;
  }
};

struct WalkBoundReport {
  std::uint64_t k = 0;
  double exact_prob = 0.0;
  double bound = 0.0;
  double slack = 0.0;
};

// P(r + S_t > 0 for all t <= horizon) at every t in [1, horizon], by forward
// DP over (time, position).  Positions above `cap` are absorbed as alive,
// which is exact whenever cap >= horizon (a position > horizon cannot reach 0
// with increments >= -1 in the remaining steps) and an upper bound otherwise.
inline std::vector<double> positivity_prob_curve(const IncrementLaw& law, std::uint64_t r,
                                                 std::uint64_t horizon,
                                                 std::uint64_t cap = 0) {
  law.validate();
  if (r == 0) throw std::invalid_argument("positivity_prob_curve: start must be >= 1");
  if (horizon == 0) throw std::invalid_argument("positivity_prob_curve: horizon must be >= 1");
  const int max_up = std::max(0, law.max_value() - 1);
  if (cap == 0) {
    cap = std::min<std::uint64_t>(horizon + 1,
                                  r + horizon * static_cast<std::uint64_t>(max_up));
    cap = std::max<std::uint64_t>(cap, 1);
  }
  if (r > cap) return std::vector<double>(horizon, 1.0);

  std::vector<double> cur(cap + 1, 0.0), next(cap + 1, 0.0);
  cur[r] = 1.0;
  KahanSum dead;
  KahanSum absorbed_alive;
  std::vector<double> curve(horizon);
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::uint64_t pos = 1; pos <= cap; ++pos) {
      const double mass = cur[pos];
      if (mass == 0.0) continue;
      for (std::size_t i = 0; i < law.values.size(); ++i) {
        const std::int64_t dest = static_cast<std::int64_t>(pos) + law.values[i] - 1;
        const double m = mass * law.probs[i];
        if (dest <= 0) {
          dead.add(m);
        } else if (dest > static_cast<std::int64_t>(cap)) {
          absorbed_alive.add(m);
        } else {
          next[static_cast<std::size_t>(dest)] += m;
        }
      }
      // truncated upward mass of the law dies with its path
      if (law.truncation_mass > 0.0) dead.add(mass * law.truncation_mass);
    }
    cur.swap(next);
    curve[t - 1] = std::clamp(1.0 - dead.value(), 0.0, 1.0);
  }
  return curve;
}

inline double positivity_prob_dp(const IncrementLaw& law, std::uint64_t r,
                                 std::uint64_t horizon, std::uint64_t cap = 0) {
  return positivity_prob_curve(law, r, horizon, cap).back();
}

inline Estimate simulate_survival(const IncrementLaw& law, std::uint64_t r,
                                  std::uint64_t horizon, std::uint64_t reps,
                                  SeedSpec seed) {
  law.validate();
  if (reps == 0) throw std::invalid_argument("simulate_survival: reps must be >= 1");
  if (r == 0) throw std::invalid_argument("simulate_survival: start must be >= 1");
  std::uint64_t hits = 0;
  for (std::uint64_t rep = 0; rep < reps; ++rep) {
    Stream rng(seed.root_seed, seed.stream_id + rep);
    std::int64_t pos = static_cast<std::int64_t>(r);
    bool alive = true;
    for (std::uint64_t t = 0; t < horizon; ++t) {
      pos += law.sample(rng) - 1;
      if (pos <= 0) {
        alive = false;
        break;
      }
    }
    if (alive) ++hits;
  }
  return wilson(hits, reps);
}

// Survival bound in the c_* form: P(X = r+1)^{-1} (1 + 2 Var[X])
// k^{-1/2}.  The probability sits in the denominator (the form the proofs
// actually use); may exceed 1, in which case it is vacuous but valid.
inline double survival_bound(const IncrementLaw& law, std::uint64_t r, std::uint64_t k) {
  law.validate();
  if (k == 0) throw std::invalid_argument("survival_bound: k must be >= 1");
  if (law.mean() > 1.0 + 1e-12)
    throw std::invalid_argument("survival_bound: E[X] must be <= 1");
  const double cr = law.prob_of_value(static_cast<int>(r) + 1);
  if (!(cr > 0.0)) throw std::invalid_argument("survival_bound: P(X = r+1) must be > 0");
  return (1.0 / cr) * (1.0 + 2.0 * law.variance()) / std::sqrt(static_cast<double>(k));
}

inline WalkBoundReport walk_bound_report(const IncrementLaw& law, std::uint64_t r,
                                         std::uint64_t k) {
  WalkBoundReport rep;
  rep.k = k;
  rep.exact_prob = positivity_prob_dp(law, r, k);
  rep.bound = survival_bound(law, r, k);
  rep.slack = rep.bound - rep.exact_prob;
  return rep;
}

struct BallotRow {
  std::int64_t j = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs
};

struct BallotReport {
  std::vector<BallotRow> rows;
  bool pass = true;
  bool exact_arithmetic = false;
  double max_ratio = 0.0;
};

namespace detail {

using u128 = unsigned __int128;

// Barrier-constrained end-point weights: index = final position r + S_n,
// weight denominator den^n.  Positions are absorbed dead once <= floor(a).
template <typename W>
std::vector<W> ballot_lhs_dp(const IncrementLaw& law, int r, double a, int n,
                             int& out_offset) {
  constexpr bool exact = std::is_same_v<W, u128>;
  // the barrier constrains the start as well: the rotation proof bounds the
  // walk S*_t = X_0 + S_t over t in {0} u [n], so a start with r <= a makes
  // the left side vacuously zero (the estimate is false without this)
  const int pos_min = static_cast<int>(std::floor(a)) + 1;
  const int max_up = std::max(0, law.max_value() - 1);
  const int pos_max = r + n * max_up;
  out_offset = pos_min;
  if (r < pos_min || pos_max < pos_min) return {};
  const std::size_t width = static_cast<std::size_t>(pos_max - pos_min + 1);
  std::vector<W> cur(width, W(0)), next(width, W(0));
  // exact mode accumulates integer weights over denominator den^n
  cur[static_cast<std::size_t>(r - pos_min)] = W(1);
  for (int t = 1; t <= n; ++t) {
    std::fill(next.begin(), next.end(), W(0));
    for (std::size_t p = 0; p < width; ++p) {
      if (cur[p] == W(0)) continue;
      for (std::size_t i = 0; i < law.values.size(); ++i) {
        const int dest = static_cast<int>(p) + pos_min + law.values[i] - 1;
        if (dest < pos_min || dest > pos_max) continue;
        if constexpr (exact)
          next[static_cast<std::size_t>(dest - pos_min)] += cur[p] * W(law.weights[i]);
        else
          next[static_cast<std::size_t>(dest - pos_min)] += cur[p] * W(law.probs[i]);
      }
    }
    cur.swap(next);
  }
  return cur;
}

}  // namespace detail

// Verifies, for every attainable end level j >= 1, that
//   P(r + S_t > a for all t in [n], r + S_n = j)
//     <= P(X1 = r)^{-1} * j / ((n+1) floor(a+1)) * P(S_{n+1} = j)
// where X1 here is the walk increment (law value minus one).  Uses exact
// integer arithmetic when the law carries rational weights small enough.
inline BallotReport ballot_check(const IncrementLaw& law, int r, double a, int n) {
  law.validate();
  if (r < 1) throw std::invalid_argument("ballot_check: r must be >= 1");
  if (n < 1) throw std::invalid_argument("ballot_check: n must be >= 1");
  if (!(a >= 0.0)) throw std::invalid_argument("ballot_check: a must be >= 0");
  const double cr = law.prob_of_value(r + 1);
  if (!(cr > 0.0))
    throw std::invalid_argument("ballot_check: P(increment = r) is zero, RHS undefined");
  const std::int64_t fa = static_cast<std::int64_t>(std::floor(a + 1.0));

  const bool exact = law.has_exact_weights() && law.truncation_mass == 0.0 &&
                     (n + 1) * std::log2(static_cast<double>(law.weight_den)) < 100.0 &&
                     fa < (std::int64_t{1} << 20);

  BallotReport report;
  report.exact_arithmetic = exact;

  // Unconstrained distribution of S_{n+1} (sum of n+1 increments from 0).
  const int max_up = std::max(0, law.max_value() - 1);
  const int lo_sum = -(n + 1);
  const int hi_sum = (n + 1) * max_up;
  const std::size_t w_sum = static_cast<std::size_t>(hi_sum - lo_sum + 1);

  if (exact) {
    using detail::u128;
    std::vector<u128> dist(w_sum, u128(0));
    dist[static_cast<std::size_t>(0 - lo_sum)] = 1;
    for (int t = 0; t < n + 1; ++t) {
      std::vector<u128> nxt(w_sum, u128(0));
      for (std::size_t s = 0; s < w_sum; ++s) {
        if (dist[s] == u128(0)) continue;
        for (std::size_t i = 0; i < law.values.size(); ++i) {
          const int dest = static_cast<int>(s) + lo_sum + law.values[i] - 1;
          if (dest < lo_sum || dest > hi_sum) continue;
          nxt[static_cast<std::size_t>(dest - lo_sum)] += dist[s] * law.weights[i];
        }
      }
      dist.swap(nxt);
    }
    int offset = 0;
    const auto lhs = detail::ballot_lhs_dp<u128>(law, r, a, n, offset);
    const u128 cr_w = law.weight_of_value(r + 1);
    const double den_n = std::pow(static_cast<double>(law.weight_den), n);
    const double den_n1 = den_n * static_cast<double>(law.weight_den);
    for (int j = 1; j <= r + n * max_up; ++j) {
      u128 lhs_w = 0;
      if (!lhs.empty() && j >= offset &&
          j - offset < static_cast<int>(lhs.size()))
        lhs_w = lhs[static_cast<std::size_t>(j - offset)];
      u128 m_j = 0;
      if (j >= lo_sum && j <= hi_sum) m_j = dist[static_cast<std::size_t>(j - lo_sum)];
      if (lhs_w == u128(0) && m_j == u128(0)) continue;
      // lhs_w/den^n <= (den/cr_w) * j/((n+1) fa) * m_j/den^{n+1}
      //   <=>  lhs_w * cr_w * (n+1) * fa <= j * m_j
      const u128 left = lhs_w * cr_w * u128(static_cast<std::uint64_t>(n + 1)) *
                        u128(static_cast<std::uint64_t>(fa));
      const u128 right = u128(static_cast<std::uint64_t>(j)) * m_j;
      BallotRow row;
      row.j = j;
      row.lhs = static_cast<double>(lhs_w) / den_n;
      row.rhs = (1.0 / cr) * (static_cast<double>(j) /
                              (static_cast<double>(n + 1) * static_cast<double>(fa))) *
                (static_cast<double>(m_j) / den_n1);
      row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs
                                : (row.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      if (left > right) report.pass = false;
      report.max_ratio = std::max(report.max_ratio, row.ratio);
      report.rows.push_back(row);
    }
    return report;
  }

  std::vector<double> dist(w_sum, 0.0);
  dist[static_cast<std::size_t>(0 - lo_sum)] = 1.0;
  for (int t = 0; t < n + 1; ++t) {
    std::vector<double> nxt(w_sum, 0.0);
    for (std::size_t s = 0; s < w_sum; ++s) {
      if (dist[s] == 0.0) continue;
      for (std::size_t i = 0; i < law.values.size(); ++i) {
        const int dest = static_cast<int>(s) + lo_sum + law.values[i] - 1;
        if (dest < lo_sum || dest > hi_sum) continue;
        nxt[static_cast<std::size_t>(dest - lo_sum)] += dist[s] * law.probs[i];
      }
    }
    dist.swap(nxt);
  }
  int offset = 0;
  const auto lhs = detail::ballot_lhs_dp<double>(law, r, a, n, offset);
  for (int j = 1; j <= r + n * max_up; ++j) {
    double lhs_p = 0.0;
    if (!lhs.empty() && j >= offset && j - offset < static_cast<int>(lhs.size()))
      lhs_p = lhs[static_cast<std::size_t>(j - offset)];
    double m_j = 0.0;
    if (j >= lo_sum && j <= hi_sum) m_j = dist[static_cast<std::size_t>(j - lo_sum)];
    if (lhs_p == 0.0 && m_j == 0.0) continue;
    BallotRow row;
    row.j = j;
    row.lhs = lhs_p;
    row.rhs = (1.0 / cr) *
              (static_cast<double>(j) /
               (static_cast<double>(n + 1) * static_cast<double>(fa))) *
              m_j;
    row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs
                              : (row.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (row.lhs > row.rhs * (1.0 + 1e-9) + 1e-15) report.pass = false;
    report.max_ratio = std::max(report.max_ratio, row.ratio);
    report.rows.push_back(row);
  }
  return report;
}

struct FavourableResult {
  std::uint64_t count = 0;
  std::int64_t total = 0;  // S_n
  bool claim_applicable = false;
};

// Counts rotations r in [n] whose rotated partial sums all stay above a.
// When S_n = j >= 1 the rotation claim  count <= j / floor(a+1)  must hold;
// a violation is a logic error, so it throws.
inline FavourableResult favourable_count(const std::vector<std::int64_t>& increments,
                                         double a) {
  const std::size_t n = increments.size();
  FavourableResult res;
  if (n == 0) return res;
  std::int64_t total = 0;
  for (const auto x : increments) total += x;
  res.total = total;
  for (std::size_t rot = 1; rot <= n; ++rot) {
    std::int64_t sum = 0;
    bool ok = true;
    for (std::size_t t = 1; t <= n; ++t) {
      sum += increments[(rot + t - 1) % n];
      if (!(static_cast<double>(sum) > a)) {
        ok = false;
        break;
      }
    }
    if (ok) ++res.count;
  }
  if (total >= 1) {
    res.claim_applicable = true;
    const std::int64_t fa = static_cast<std::int64_t>(std::floor(a + 1.0));
    if (static_cast<std::int64_t>(res.count) * fa > total)
      throw invariant_error("favourable_count: rotation bound violated");
  }
  return res;
}

}  // namespace critlab
