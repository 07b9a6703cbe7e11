#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "detlim/common.hpp"
#include "detlim/divergence.hpp"
#include "detlim/pmf.hpp"

namespace detlim {

enum class LKind { Kl, Tv, Js, Wasserstein };
enum class Regime { General, Euclidean };
enum class TestKind { NeymanPearson, Bayes };

inline constexpr double kLn2 = 0.6931471805599453;

// Abstracted GAN: the distance it minimizes, its oracle error, and the
// auxiliary constants some bounds need.
struct GanSpec {
  LKind l_kind = LKind::Kl;
  double opt = 0.0;
  std::optional<double> p_g_star;  // min generated mass, Bayesian KL bound only
  std::optional<double> diam;      // space diameter, Wasserstein only

  void validate() const {
    if (!(opt >= 0.0)) throw OptOutOfRange("opt must be >= 0");
    if (p_g_star && !(*p_g_star > 0.0 && *p_g_star <= 1.0))
      throw BadArgument("p_g_star must lie in (0, 1]");
    if (diam && !(*diam > 0.0)) throw BadArgument("diam must be positive");
    switch (l_kind) {
      case LKind::Tv:
        if (opt > 1.0) throw OptOutOfRange("TV oracle error cannot exceed 1");
        break;
      case LKind::Js:
        if (opt > kLn2 + kSlackTol)
          throw OptOutOfRange("JS oracle error cannot exceed ln 2");
        break;
      case LKind::Wasserstein:
        if (diam && opt > *diam)
          throw OptOutOfRange("Wasserstein oracle error cannot exceed diam");
        break;
      case LKind::Kl:
        break;
    }
  }
};

namespace detail {

inline double require_diam(const GanSpec& spec) {
  if (!spec.diam) throw MissingDiam("Wasserstein bounds need diam");
  return *spec.diam;
}

// Shared Neyman-Pearson log exponent. The Euclidean regime changes only the
// JS entry, so routing both regimes through this function makes the
// unchanged rows identical bit for bit.
inline double np_log_core(const GanSpec& spec, double n, Regime regime) {
  switch (spec.l_kind) {
    case LKind::Kl: return -n * spec.opt;
    case LKind::Tv: return -2.0 * n * spec.opt * spec.opt;
    case LKind::Js:
      return regime == Regime::General ? -0.5 * n * spec.opt * spec.opt
                                       : -2.0 * n * spec.opt;
    case LKind::Wasserstein: {
      const double d = require_diam(spec);
      return -2.0 * n * spec.opt * spec.opt / (d * d);
    }
  }
  return 0.0;
}

inline double bayes_general_log(const GanSpec& spec, double n) {
  double base = 0.0;
  switch (spec.l_kind) {
    case LKind::Kl: {
      if (!spec.p_g_star) throw MissingPgStar("Bayesian KL bound needs p_g_star");
      base = 1.0 - (*spec.p_g_star / 4.0) * spec.opt;
      break;
    }
    case LKind::Tv:
      base = 1.0 - spec.opt * spec.opt;
      break;
    case LKind::Js:
      base = 1.0 - spec.opt * spec.opt / 4.0;
      break;
    case LKind::Wasserstein: {
      const double d = require_diam(spec);
      base = 1.0 - (spec.opt / d) * (spec.opt / d);
      break;
    }
  }
  if (base < 0.0)
    throw InvalidBase("oracle error outside the admissible range, base = " +
                      std::to_string(base));
  base = std::min(base, 1.0);
  return 0.5 * n * std::log(base);  // log(0) = -inf, bound 0
}

}  // namespace detail

// Natural log of the selected bound; the canonical representation (linear
// values underflow around n ~ 10^6).
inline double log_bound(const GanSpec& spec, std::int64_t n, Regime regime,
                        TestKind test) {
  spec.validate();
  if (n < 1) throw BadArgument("n must be >= 1");
  const double nd = static_cast<double>(n);
  if (test == TestKind::NeymanPearson) return detail::np_log_core(spec, nd, regime);
  if (regime == Regime::General) return detail::bayes_general_log(spec, nd);
  // Euclidean Bayes exponent is exactly a quarter of the Neyman-Pearson one.
  return 0.25 * detail::np_log_core(spec, nd, regime);
}

inline double bound_from_log(double lb) {
  return std::clamp(std::exp(lb), 0.0, 1.0);
}

inline double table1_np(const GanSpec& spec, std::int64_t n) {
  return bound_from_log(log_bound(spec, n, Regime::General, TestKind::NeymanPearson));
}
inline double table1_bayes(const GanSpec& spec, std::int64_t n) {
  return bound_from_log(log_bound(spec, n, Regime::General, TestKind::Bayes));
}
inline double table2_np(const GanSpec& spec, std::int64_t n) {
  return bound_from_log(log_bound(spec, n, Regime::Euclidean, TestKind::NeymanPearson));
}
inline double table2_bayes(const GanSpec& spec, std::int64_t n) {
  return bound_from_log(log_bound(spec, n, Regime::Euclidean, TestKind::Bayes));
}

struct BoundReport {
  Regime regime = Regime::General;
  TestKind test = TestKind::NeymanPearson;
  std::int64_t n = 1;
  GanSpec spec;
  double log_bound = 0.0;
  double bound = 1.0;
};

inline BoundReport evaluate_bound(const GanSpec& spec, std::int64_t n, Regime regime,
                                  TestKind test) {
  BoundReport r;
  r.regime = regime;
  r.test = test;
  r.n = n;
  r.spec = spec;
  r.log_bound = log_bound(spec, n, regime, test);
  r.bound = bound_from_log(r.log_bound);
  return r;
}

// Patch-wise generalization: the image bound is the product over patches of
// the per-patch bound at (spec_i, m_i), accumulated in log domain.
struct PatchSpec {
  std::int64_t pixel_count = 0;
  GanSpec spec;
};

struct PatchBoundResult {
  double log_bound = 0.0;
  double bound = 1.0;
};

inline PatchBoundResult patch_bound(std::span<const PatchSpec> patches, Regime regime,
                                    TestKind test) {
  if (patches.empty()) throw BadArgument("patch list is empty");
  double total = 0.0;
  for (const auto& patch : patches)
    total += log_bound(patch.spec, patch.pixel_count, regime, test);
  return {total, bound_from_log(total)};
}

// One checked inequality: holds iff slack = rhs - lhs >= -kSlackTol.
struct InequalityCheck {
  bool evaluated = false;
  double lhs = 0.0;
  double rhs = 0.0;

  double slack() const noexcept { return rhs - lhs; }
  bool holds() const noexcept {
    if (!evaluated) return true;
    if (is_inf(rhs) && rhs > 0) return true;
    return slack() >= -kSlackTol;
  }
};

// The four distance inequalities the bound derivations rest on, evaluated on
// a concrete pair. Reverse Pinsker applies only when q has full support; the
// Wasserstein bound only when a metric space is supplied.
struct InequalityReport {
  InequalityCheck pinsker;           // tv^2 <= kl/2
  InequalityCheck reverse_pinsker;   // kl <= (4/min q) tv^2
  InequalityCheck js_vs_tv;          // js <= 2 tv
  InequalityCheck wasserstein_vs_tv; // w1 <= diam * tv

  bool all_hold() const noexcept {
    return pinsker.holds() && reverse_pinsker.holds() && js_vs_tv.holds() &&
           wasserstein_vs_tv.holds();
  }
};

inline InequalityReport check_inequalities(const Pmf& p, const Pmf& q,
                                           const MetricAlphabet* space = nullptr) {
  detail::require_shared_alphabet(p, q);
  InequalityReport report;

  const double d = kl(p, q);
  const double t = tv(p, q);

  report.pinsker = {true, t * t, is_inf(d) ? kInf : 0.5 * d};

  const double qmin = q.min_prob();
  if (qmin > 0.0) report.reverse_pinsker = {true, d, (4.0 / qmin) * t * t};

  report.js_vs_tv = {true, js(p, q), 2.0 * t};

  if (space != nullptr)
    report.wasserstein_vs_tv = {true, wasserstein_1d(p, q, *space),
                                space->diameter() * t};

  return report;
}

inline std::string to_string(LKind k) {
  switch (k) {
    case LKind::Kl: return "kl";
    case LKind::Tv: return "tv";
    case LKind::Js: return "js";
    case LKind::Wasserstein: return "wasserstein";
  }
  return "?";
}
inline std::string to_string(Regime r) {
  return r == Regime::General ? "general" : "euclidean";
}
inline std::string to_string(TestKind t) {
  return t == TestKind::NeymanPearson ? "np" : "bayes";
}

inline LKind l_kind_from_string(const std::string& s) {
  if (s == "kl") return LKind::Kl;
  if (s == "tv") return LKind::Tv;
  if (s == "js") return LKind::Js;
  if (s == "wasserstein") return LKind::Wasserstein;
  throw BadArgument("unknown l-kind '" + s + "'");
}
inline Regime regime_from_string(const std::string& s) {
  if (s == "general") return Regime::General;
  if (s == "euclidean") return Regime::Euclidean;
  throw BadArgument("unknown regime '" + s + "'");
}
inline TestKind test_kind_from_string(const std::string& s) {
  if (s == "np") return TestKind::NeymanPearson;
  if (s == "bayes") return TestKind::Bayes;
  throw BadArgument("unknown test '" + s + "'");
}

}  // namespace detlim
