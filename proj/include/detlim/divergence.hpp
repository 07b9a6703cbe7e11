#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "detlim/common.hpp"
#include "detlim/pmf.hpp"

namespace detlim {

namespace detail {
inline void require_shared_alphabet(const Pmf& p, const Pmf& q) {
  if (!p.same_alphabet(q))
    throw AlphabetMismatch("distributions are over different alphabets");
}
}  // namespace detail

// D(p||q) in nats, with 0 ln(0/.) = 0. Returns +infinity iff some symbol has
// p > 0 and q = 0.
inline double kl(const Pmf& p, const Pmf& q) {
  detail::require_shared_alphabet(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p.prob(i), qi = q.prob(i);
    if (pi == 0.0) continue;
    if (qi == 0.0) return kInf;
    sum += pi * std::log(pi / qi);
  }
  return std::max(sum, 0.0);
}

inline double tv(const Pmf& p, const Pmf& q) {
  detail::require_shared_alphabet(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p.prob(i) - q.prob(i));
  return std::min(0.5 * sum, 1.0);
}

// Jensen-Shannon divergence in nats via the equal mixture; finite, in [0, ln 2].
inline double js(const Pmf& p, const Pmf& q) {
  detail::require_shared_alphabet(p, q);
  double dp = 0.0, dq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p.prob(i), qi = q.prob(i);
    const double mi = 0.5 * (pi + qi);
    if (pi > 0) dp += pi * std::log(pi / mi);
    if (qi > 0) dq += qi * std::log(qi / mi);
  }
  return std::max(0.5 * (dp + dq), 0.0);
}

// Exact W1 on the line: sum over consecutive positions of |F_p - F_q| times
// the gap width.
inline double wasserstein_1d(const Pmf& p, const Pmf& q, const MetricAlphabet& space) {
  detail::require_shared_alphabet(p, q);
  if (!space.matches(p))
    throw SpaceMismatch("metric alphabet does not match the distributions");
  double fp = 0.0, fq = 0.0, w = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    fp += p.prob(i);
    fq += q.prob(i);
    w += std::abs(fp - fq) * (space.positions()[i + 1] - space.positions()[i]);
  }
  return w;
}

// Weighted chi-squared distance sum (p-q)^2 / weight. The weight must be
// positive wherever p and q differ.
inline double chi_squared_weighted(const Pmf& p, const Pmf& q, const Pmf& weight) {
  detail::require_shared_alphabet(p, q);
  detail::require_shared_alphabet(p, weight);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p.prob(i) - q.prob(i);
    if (d == 0.0) continue;
    if (weight.prob(i) <= 0.0)
      throw ZeroWeightAtDifference("weight vanishes at '" + p.label(i) +
                                   "' where the distributions differ");
    sum += d * d / weight.prob(i);
  }
  return sum;
}

struct ChernoffResult {
  double value = 0.0;    // nats; +infinity when supports are disjoint
  double lambda = 0.5;   // equalizing tilt
  bool disjoint_support = false;
};

namespace detail {

// KL divergences from the tilted mixture p^l q^(1-l) (normalized over the
// common support) to p and to q.
inline std::pair<double, double> tilted_kls(const Pmf& p, const Pmf& q, double lambda) {
  const std::size_t k = p.size();
  std::vector<double> w(k, 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double pi = p.prob(i), qi = q.prob(i);
    if (pi > 0 && qi > 0) {
      w[i] = std::pow(pi, lambda) * std::pow(qi, 1.0 - lambda);
      z += w[i];
    }
  }
  double d1 = 0.0, d2 = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (w[i] == 0.0) continue;
    const double m = w[i] / z;
    d1 += m * std::log(m / p.prob(i));
    d2 += m * std::log(m / q.prob(i));
  }
  return {d1, d2};
}

}  // namespace detail

// Chernoff information C(p, q) with the equalizing tilt lambda*.
//
// The difference D(P_l||p) - D(P_l||q) is continuous and strictly decreasing
// in l (it equals the negated derivative of the convex cumulant
// log sum p^l q^(1-l)), so lambda* is found by bisection on
// [1e-9, 1-1e-9] until the two divergences agree to 1e-10 (at most 200
// halvings). Identical inputs short-circuit to (0, 0.5); disjoint supports
// yield value +infinity with a flag, since the tilted mixture is undefined
// at interior lambda.
inline ChernoffResult chernoff_information(const Pmf& p, const Pmf& q) {
  detail::require_shared_alphabet(p, q);
  if (p.same_masses(q)) return {0.0, 0.5, false};

  bool overlap = false;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.prob(i) > 0 && q.prob(i) > 0) { overlap = true; break; }
  if (!overlap) return {kInf, 0.5, true};

  constexpr double kLambdaMin = 1e-9;
  constexpr double kLambdaMax = 1.0 - 1e-9;
  constexpr double kEqualizeTol = 1e-10;
  constexpr int kMaxIter = 200;

  auto diff_at = [&](double lam) {
    const auto [d1, d2] = detail::tilted_kls(p, q, lam);
    return std::make_pair(d1 - d2, std::min(d1, d2));
  };

  auto [glo, vlo] = diff_at(kLambdaMin);
  auto [ghi, vhi] = diff_at(kLambdaMax);
  if (glo <= 0.0) return {vlo, kLambdaMin, false};  // boundary optimum
  if (ghi >= 0.0) return {vhi, kLambdaMax, false};

  double lo = kLambdaMin, hi = kLambdaMax;
  double lambda = 0.5, value = 0.0;
  for (int it = 0; it < kMaxIter; ++it) {
    lambda = 0.5 * (lo + hi);
    const auto [g, v] = diff_at(lambda);
    value = v;
    if (std::abs(g) <= kEqualizeTol) break;
    if (g > 0.0)
      lo = lambda;
    else
      hi = lambda;
  }
  return {value, lambda, false};
}

// Low-error approximation of Chernoff information: D(p||q)/4. Infinite KL
// passes through.
inline double euclidean_chernoff_approx(const Pmf& p, const Pmf& q) {
  return kl(p, q) / 4.0;
}

// All distances between one pair, plus the Chernoff point.
struct DivergenceReport {
  double kl_forward = 0.0;
  double tv = 0.0;
  double js = 0.0;
  std::optional<double> wasserstein;
  double chernoff = 0.0;
  double chernoff_lambda = 0.5;
};

inline DivergenceReport divergence_report(const Pmf& p, const Pmf& q,
                                          const MetricAlphabet* space = nullptr) {
  DivergenceReport report;
  report.kl_forward = kl(p, q);
  report.tv = tv(p, q);
  report.js = js(p, q);
  if (space != nullptr) report.wasserstein = wasserstein_1d(p, q, *space);
  const ChernoffResult c = chernoff_information(p, q);
  report.chernoff = c.value;
  report.chernoff_lambda = c.lambda;
  return report;
}

}  // namespace detlim
