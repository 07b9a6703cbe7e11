#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "detlim/common.hpp"
#include "detlim/bounds.hpp"
#include "detlim/divergence.hpp"
#include "detlim/pmf.hpp"
#include "detlim/rng.hpp"

namespace detlim {

// z for two-sided 99% Wilson score intervals.
inline constexpr double kWilsonZ99 = 2.5758293035489004;

inline double wilson_halfwidth(std::int64_t successes, std::int64_t trials,
                               double z = kWilsonZ99) {
  if (trials < 1) throw BadArgument("trials must be >= 1");
  const double t = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / t;
  const double denom = 1.0 + z * z / t;
  return (z / denom) * std::sqrt(phat * (1.0 - phat) / t + z * z / (4.0 * t * t));
}

// One Monte Carlo experiment: H0 = p_legit, H1 = p_fake, n pixels per image.
struct TestConfig {
  Pmf p_legit;
  Pmf p_fake;
  std::int64_t n = 1;
  double alpha = 0.05;                       // Neyman-Pearson false-alarm budget
  std::array<double, 2> priors = {0.5, 0.5}; // (pi0, pi1) for the Bayesian test
  std::int64_t trials = 10000;
  std::uint64_t seed = 0;

  void validate() const {
    if (!p_legit.same_alphabet(p_fake))
      throw AlphabetMismatch("hypotheses must share an alphabet");
    if (n < 1) throw BadArgument("n must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw BadArgument("alpha must be in (0,1)");
    if (priors[0] < 0.0 || priors[1] < 0.0 ||
        std::abs(priors[0] + priors[1] - 1.0) > kProbStoredTol)
      throw BadArgument("priors must be nonnegative and sum to 1");
    if (trials < 1) throw BadArgument("trials must be >= 1");
  }
};

struct ErrorEstimate {
  double alpha_hat = 0.0;  // type-I rate
  double beta_hat = 0.0;   // type-II rate
  double pe_hat = 0.0;     // prior-weighted error, pi0*alpha_hat + pi1*beta_hat
  double wilson_halfwidth = 0.0;
  std::int64_t trials = 0;
  double threshold = 0.0;  // calibrated LLR threshold (np) or log prior ratio (bayes)
  bool degenerate = false; // p_legit equals p_fake
};

namespace detail {

// Per-symbol log likelihood ratios ln(q/p). Symbols outside both supports
// are never drawn; a sample containing one is rejected loudly.
inline std::vector<double> llr_table(const Pmf& p, const Pmf& q) {
  std::vector<double> table(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p.prob(i), qi = q.prob(i);
    if (pi > 0 && qi > 0)
      table[i] = std::log(qi / pi);
    else if (pi > 0)
      table[i] = -kInf;
    else if (qi > 0)
      table[i] = kInf;
    else
      table[i] = std::numeric_limits<double>::quiet_NaN();
  }
  return table;
}

inline double llr_of_draws(std::span<const std::uint32_t> symbols,
                           std::span<const double> table, const Pmf& p,
                           const Pmf& q) {
  double finite = 0.0;
  std::int64_t pos_inf = 0, neg_inf = 0;
  for (const std::uint32_t s : symbols) {
    if (s >= table.size()) throw BadArgument("symbol index outside the alphabet");
    const double v = table[s];
    if (std::isnan(v))
      throw BothZeroMass("symbol '" + p.label(s) + "' has zero mass under '" +
                         q.label(s) + "' and the reference");
    if (v == kInf)
      ++pos_inf;
    else if (v == -kInf)
      ++neg_inf;
    else
      finite += v;
  }
  if (pos_inf > 0 && neg_inf > 0)
    return std::numeric_limits<double>::quiet_NaN();  // impossible under either hypothesis
  if (pos_inf > 0) return kInf;
  if (neg_inf > 0) return -kInf;
  return finite;
}

// Draw n symbols and accumulate the LLR without materializing the sample.
inline double simulate_llr(const CategoricalSampler& sampler,
                           std::span<const double> table, std::int64_t n,
                           SplitMix64& rng) {
  double finite = 0.0;
  std::int64_t pos_inf = 0, neg_inf = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double v = table[sampler.draw(rng)];
    if (v == kInf)
      ++pos_inf;
    else if (v == -kInf)
      ++neg_inf;
    else
      finite += v;
  }
  if (pos_inf > 0) return kInf;
  if (neg_inf > 0) return -kInf;
  return finite;
}

}  // namespace detail

// Log likelihood ratio sum ln(q(y)/p(y)) over the sample, the test statistic
// throughout. Infinite when a symbol is impossible under exactly one
// hypothesis.
inline double llr(const Sample& sample, const Pmf& p, const Pmf& q) {
  detail::require_shared_alphabet(p, q);
  const auto table = detail::llr_table(p, q);
  return detail::llr_of_draws(sample.symbols, table, p, q);
}

// Neyman-Pearson test with an empirically calibrated threshold: the LLR
// threshold is the smallest observed H0 statistic such that the empirical
// false alarm over `trials` H0 simulations stays at or below alpha
// (conservative at ties), then the miss rate is estimated on `trials` H1
// simulations. H0 trial t draws from sub-stream (seed, 0, t); H1 from
// (seed, 1, t). Identical configurations give identical estimates.
//
// When the two hypotheses are the same distribution, no statistic separates
// them; the test degenerates to a blind alpha-level coin and the result is
// flagged.
inline ErrorEstimate np_test(const TestConfig& config) {
  config.validate();
  ErrorEstimate est;
  est.trials = config.trials;

  if (config.p_legit.same_masses(config.p_fake)) {
    est.degenerate = true;
    const std::uint64_t h0_seed = derive_seed(config.seed, 0);
    const std::uint64_t h1_seed = derive_seed(config.seed, 1);
    std::int64_t rejects0 = 0, rejects1 = 0;
    for (std::int64_t t = 0; t < config.trials; ++t) {
      SplitMix64 rng0(derive_seed(h0_seed, static_cast<std::uint64_t>(t)));
      SplitMix64 rng1(derive_seed(h1_seed, static_cast<std::uint64_t>(t)));
      rejects0 += rng0.bernoulli(config.alpha) ? 1 : 0;
      rejects1 += rng1.bernoulli(config.alpha) ? 1 : 0;
    }
    est.alpha_hat = static_cast<double>(rejects0) / static_cast<double>(config.trials);
    est.beta_hat =
        static_cast<double>(config.trials - rejects1) / static_cast<double>(config.trials);
    est.pe_hat = config.priors[0] * est.alpha_hat + config.priors[1] * est.beta_hat;
    est.wilson_halfwidth = wilson_halfwidth(config.trials - rejects1, config.trials);
    est.threshold = kInf;
    return est;
  }

  const auto table = detail::llr_table(config.p_legit, config.p_fake);
  const CategoricalSampler sampler_p(config.p_legit);
  const CategoricalSampler sampler_q(config.p_fake);

  std::vector<double> h0_stats;
  h0_stats.reserve(static_cast<std::size_t>(config.trials));
  const std::uint64_t h0_seed = derive_seed(config.seed, 0);
  for (std::int64_t t = 0; t < config.trials; ++t) {
    SplitMix64 rng(derive_seed(h0_seed, static_cast<std::uint64_t>(t)));
    h0_stats.push_back(detail::simulate_llr(sampler_p, table, config.n, rng));
  }

  std::vector<double> sorted = h0_stats;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const auto k = static_cast<std::size_t>(
      std::floor(config.alpha * static_cast<double>(config.trials)));
  const double threshold = sorted[std::min(k, sorted.size() - 1)];
  est.threshold = threshold;

  std::int64_t false_alarms = 0;
  for (const double s : h0_stats) false_alarms += s > threshold ? 1 : 0;
  est.alpha_hat = static_cast<double>(false_alarms) / static_cast<double>(config.trials);

  std::int64_t misses = 0;
  const std::uint64_t h1_seed = derive_seed(config.seed, 1);
  for (std::int64_t t = 0; t < config.trials; ++t) {
    SplitMix64 rng(derive_seed(h1_seed, static_cast<std::uint64_t>(t)));
    const double s = detail::simulate_llr(sampler_q, table, config.n, rng);
    misses += s <= threshold ? 1 : 0;
  }
  est.beta_hat = static_cast<double>(misses) / static_cast<double>(config.trials);
  est.pe_hat = config.priors[0] * est.alpha_hat + config.priors[1] * est.beta_hat;
  est.wilson_halfwidth = wilson_halfwidth(misses, config.trials);
  return est;
}

// Bayesian MAP test: decide fake when llr exceeds ln(pi0/pi1), ties to
// legitimate. Each trial draws its hypothesis from the priors, then the
// sample, from sub-stream (seed, t). alpha_hat and beta_hat are rates
// conditional on the drawn hypothesis, so pe_hat = pi0*alpha_hat +
// pi1*beta_hat holds exactly.
inline ErrorEstimate bayes_test(const TestConfig& config) {
  config.validate();
  ErrorEstimate est;
  est.trials = config.trials;
  est.degenerate = config.p_legit.same_masses(config.p_fake);

  const double threshold =
      config.priors[1] == 0.0
          ? kInf
          : (config.priors[0] == 0.0 ? -kInf : std::log(config.priors[0] / config.priors[1]));
  est.threshold = threshold;

  const auto table = detail::llr_table(config.p_legit, config.p_fake);
  const CategoricalSampler sampler_p(config.p_legit);
  const CategoricalSampler sampler_q(config.p_fake);

  std::int64_t n0 = 0, n1 = 0, type1 = 0, type2 = 0;
  for (std::int64_t t = 0; t < config.trials; ++t) {
    SplitMix64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(t)));
    const bool fake = rng.bernoulli(config.priors[1]);
    const double s = detail::simulate_llr(fake ? sampler_q : sampler_p, table,
                                          config.n, rng);
    const bool decide_fake = s > threshold;
    if (fake) {
      ++n1;
      type2 += decide_fake ? 0 : 1;
    } else {
      ++n0;
      type1 += decide_fake ? 1 : 0;
    }
  }
  est.alpha_hat = n0 > 0 ? static_cast<double>(type1) / static_cast<double>(n0) : 0.0;
  est.beta_hat = n1 > 0 ? static_cast<double>(type2) / static_cast<double>(n1) : 0.0;
  est.pe_hat = config.priors[0] * est.alpha_hat + config.priors[1] * est.beta_hat;
  est.wilson_halfwidth = wilson_halfwidth(type1 + type2, config.trials);
  return est;
}

struct ExactError {
  double alpha_exact = 0.0;
  double beta_exact = 0.0;
  double pe_exact = 0.0;
};

namespace detail {

inline void check_enumerable(const Pmf& p, std::int64_t n) {
  if (n < 1) throw BadArgument("n must be >= 1");
  double count = 1.0;
  for (std::int64_t i = 0; i < n; ++i) {
    count *= static_cast<double>(p.size());
    if (count > 1e7) throw TooLarge("alphabet^n exceeds 10^7 sequences");
  }
}

// Visit every length-n sequence with its exact probability under both
// hypotheses. Independent of the Monte Carlo path by construction.
template <typename Visit>
void enumerate_sequences(const Pmf& p, const Pmf& q, std::int64_t n, Visit&& visit) {
  const std::size_t k = p.size();
  std::vector<std::uint32_t> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    double p0 = 1.0, p1 = 1.0;
    for (const std::uint32_t s : idx) {
      p0 *= p.prob(s);
      p1 *= q.prob(s);
    }
    visit(p0, p1);
    std::size_t pos = 0;
    while (pos < idx.size() && ++idx[pos] == k) {
      idx[pos] = 0;
      ++pos;
    }
    if (pos == idx.size()) break;
  }
}

}  // namespace detail

// Exact Neyman-Pearson error by full enumeration: sequences are grouped by
// their likelihood-ratio value, atoms enter the rejection region in
// decreasing order while the exact false alarm stays at or below alpha
// (conservative, mirroring the Monte Carlo calibration in the large-trials
// limit).
inline ExactError exact_error_small_n(const Pmf& p, const Pmf& q, std::int64_t n,
                                      double alpha) {
  detail::require_shared_alphabet(p, q);
  detail::check_enumerable(p, n);
  if (!(alpha > 0.0 && alpha < 1.0)) throw BadArgument("alpha must be in (0,1)");

  std::map<double, std::pair<double, double>> atoms;  // llr -> (P0 mass, P1 mass)
  detail::enumerate_sequences(p, q, n, [&](double p0, double p1) {
    if (p0 == 0.0 && p1 == 0.0) return;
    const double ratio = p0 == 0.0 ? kInf : (p1 == 0.0 ? -kInf : std::log(p1 / p0));
    auto& cell = atoms[ratio];
    cell.first += p0;
    cell.second += p1;
  });

  ExactError out;
  double rejected0 = 0.0, rejected1 = 0.0;
  for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) {
    if (rejected0 + it->second.first > alpha + 1e-15) break;
    rejected0 += it->second.first;
    rejected1 += it->second.second;
  }
  out.alpha_exact = rejected0;
  out.beta_exact = 1.0 - rejected1;
  out.pe_exact = 0.5 * (out.alpha_exact + out.beta_exact);
  return out;
}

// Exact Bayesian MAP error by full enumeration, ties to the legitimate
// hypothesis.
inline ExactError exact_error_small_n(const Pmf& p, const Pmf& q, std::int64_t n,
                                      const std::array<double, 2>& priors) {
  detail::require_shared_alphabet(p, q);
  detail::check_enumerable(p, n);
  if (priors[0] < 0.0 || priors[1] < 0.0 ||
      std::abs(priors[0] + priors[1] - 1.0) > kProbStoredTol)
    throw BadArgument("priors must be nonnegative and sum to 1");

  ExactError out;
  detail::enumerate_sequences(p, q, n, [&](double p0, double p1) {
    const bool decide_fake = priors[1] * p1 > priors[0] * p0;
    if (decide_fake)
      out.alpha_exact += p0;
    else
      out.beta_exact += p1;
  });
  out.pe_exact = priors[0] * out.alpha_exact + priors[1] * out.beta_exact;
  return out;
}

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
  std::vector<double> rates;
};

// Least-squares fit of -ln(rate) against n.
inline ExponentFit fit_exponent(std::span<const std::int64_t> ns,
                                std::span<const double> rates) {
  if (ns.size() != rates.size()) throw LengthMismatch("grid and rates differ in length");
  if (ns.size() < 2) throw BadArgument("need at least two grid points");
  for (std::size_t i = 0; i < rates.size(); ++i)
    if (!(rates[i] > 0.0))
      throw ZeroRateAtGridPoint("rate is zero at n = " + std::to_string(ns[i]) +
                                "; shrink the n grid");
  const double m = static_cast<double>(ns.size());
  double nbar = 0.0, ybar = 0.0;
  std::vector<double> ys(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    ys[i] = -std::log(rates[i]);
    nbar += static_cast<double>(ns[i]);
    ybar += ys[i];
  }
  nbar /= m;
  ybar /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double dx = static_cast<double>(ns[i]) - nbar;
    const double dy = ys[i] - ybar;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw BadArgument("degenerate n grid");
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * nbar;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * static_cast<double>(ns[i]));
    ss_res += r * r;
  }
  fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  fit.rates.assign(rates.begin(), rates.end());
  return fit;
}

// Runs the selected test across an n grid (sub-seeded per point) and fits
// the error exponent.
inline ExponentFit exponent_fit(const TestConfig& base,
                                std::span<const std::int64_t> n_grid, TestKind kind) {
  if (n_grid.size() < 4) throw BadArgument("n grid needs at least 4 points");
  std::vector<double> rates;
  rates.reserve(n_grid.size());
  for (const std::int64_t n : n_grid) {
    TestConfig cfg = base;
    cfg.n = n;
    cfg.seed = derive_seed(base.seed, static_cast<std::uint64_t>(n));
    const ErrorEstimate est =
        kind == TestKind::NeymanPearson ? np_test(cfg) : bayes_test(cfg);
    rates.push_back(kind == TestKind::NeymanPearson ? est.beta_hat : est.pe_hat);
  }
  return fit_exponent(n_grid, rates);
}

}  // namespace detlim
