#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "detlim/bounds.hpp"
#include "detlim/common.hpp"
#include "detlim/graph.hpp"
#include "detlim/rng.hpp"

namespace detlim {

// Per-step SIR probabilities. gamma is the recovery probability, i.e. the
// probability of correctly detecting the deepfake, 1 - P_e.
struct EpidemicParams {
  double beta_trans = 0.0;  // transmission probability per infected-susceptible edge
  double gamma = 1.0;       // recovery probability per step
  double lambda_c = 0.0;    // structural threshold the caller compares against

  double lambda() const {
    if (!(gamma > 0.0)) throw BadArgument("gamma must be positive");
    return beta_trans / gamma;
  }
  void validate() const {
    if (!(beta_trans >= 0.0 && beta_trans <= 1.0))
      throw BadArgument("beta_trans must be in [0,1]");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw BadArgument("gamma must be in (0,1]");
  }
};

// Heterogeneous mean-field SIR threshold <k> / (<k^2> - <k>) from the degree
// sequence.
inline double mean_field_threshold(const Graph& g) {
  const double k1 = g.mean_degree();
  const double k2 = g.mean_degree_squared();
  if (!(k2 > k1)) throw DegenerateDegrees("<k^2> must exceed <k>");
  return k1 / (k2 - k1);
}

// Alternative structural threshold 1/lambda_max(adjacency). The leading
// eigenvalue comes from power iteration on A + I (the shift keeps bipartite
// spectra from oscillating), tolerance 1e-8 on the Rayleigh quotient.
inline double spectral_threshold(const Graph& g) {
  if (g.edge_count() == 0) throw NoEdges("graph has no edges");
  const std::uint32_t n = g.node_count();
  std::vector<double> x(n, 1.0), y(n, 0.0);
  double eig = 0.0;
  for (int iter = 0; iter < 100000; ++iter) {
    for (std::uint32_t u = 0; u < n; ++u) {
      double acc = x[u];  // identity shift
      for (const std::uint32_t v : g.neighbors(u)) acc += x[v];
      y[u] = acc;
    }
    double num = 0.0, den = 0.0, norm = 0.0;
    for (std::uint32_t u = 0; u < n; ++u) {
      num += x[u] * y[u];
      den += x[u] * x[u];
      norm += y[u] * y[u];
    }
    const double next = num / den;
    norm = std::sqrt(norm);
    for (std::uint32_t u = 0; u < n; ++u) x[u] = y[u] / norm;
    if (iter > 0 && std::abs(next - eig) <= 1e-8 * std::max(1.0, std::abs(next))) {
      eig = next;
      break;
    }
    eig = next;
  }
  const double lambda_max = eig - 1.0;
  if (!(lambda_max > 0.0)) throw NoEdges("no positive adjacency eigenvalue");
  return 1.0 / lambda_max;
}

// Effective spreading rate beta / (1 - pe).
inline double effective_rate(double beta_trans, double pe) {
  if (!(pe >= 0.0)) throw BadArgument("pe must be nonnegative");
  if (pe >= 1.0 - 1e-12)
    throw PerfectFoolability("detection error ~ 1, spreading rate diverges");
  return beta_trans / (1.0 - pe);
}

// Minimum bound exponent f(OPT) that keeps the spread locally containable:
// -(1/n) ln(1 - beta/lambda_c). Empty when beta >= lambda_c: no finite
// exponent contains the spread.
inline std::optional<double> containment_requirement(std::int64_t n, double beta_trans,
                                                     double lambda_c) {
  if (n < 1) throw BadArgument("n must be >= 1");
  if (!(beta_trans >= 0.0)) throw BadArgument("beta_trans must be nonnegative");
  if (!(lambda_c > 0.0)) throw BadArgument("lambda_c must be positive");
  if (beta_trans >= lambda_c) return std::nullopt;
  return -std::log(1.0 - beta_trans / lambda_c) / static_cast<double>(n);
}

// Per-pixel exponent of the selected error bound: the bound is
// exp(-n f(OPT)), so f = -log_bound / n, independent of n.
inline double f_of_opt(const GanSpec& spec, Regime regime, TestKind test) {
  return -log_bound(spec, 1, regime, test);
}

struct StepCounts {
  std::uint32_t susceptible = 0;
  std::uint32_t infected = 0;
  std::uint32_t recovered = 0;
};

struct SirResult {
  double final_recovered_fraction = 0.0;
  double peak_infected_fraction = 0.0;
  std::uint32_t duration_steps = 0;
  std::vector<StepCounts> trajectory;  // index 0 is the initial state
};

// Discrete-time synchronous SIR. Each step, every node infected at the start
// of the step tries to infect each currently susceptible neighbor with
// probability beta (nodes in ascending index order, neighbors in adjacency
// order), then recovers with probability gamma; infections committed this
// step become infectious next step. Runs until no node is infected or
// max_steps.
inline SirResult simulate_sir(const Graph& g, const EpidemicParams& params,
                              std::span<const std::uint32_t> initial_infected,
                              std::uint32_t max_steps, std::uint64_t seed) {
  params.validate();
  if (initial_infected.empty()) throw BadArgument("need at least one seed node");

  enum : std::uint8_t { S = 0, I = 1, R = 2 };
  const std::uint32_t n = g.node_count();
  std::vector<std::uint8_t> state(n, S);
  std::vector<std::uint32_t> infected;
  for (const std::uint32_t u : initial_infected) {
    if (u >= n) throw BadArgument("seed node outside the graph");
    if (state[u] == S) {
      state[u] = I;
      infected.push_back(u);
    }
  }
  std::sort(infected.begin(), infected.end());

  SplitMix64 rng(seed);
  SirResult result;
  std::uint32_t recovered = 0;
  auto record = [&] {
    const auto i = static_cast<std::uint32_t>(infected.size());
    result.trajectory.push_back({n - i - recovered, i, recovered});
    result.peak_infected_fraction =
        std::max(result.peak_infected_fraction, static_cast<double>(i) / n);
  };
  record();

  std::vector<std::uint32_t> newly, survivors, merged;
  std::uint32_t step = 0;
  while (!infected.empty() && step < max_steps) {
    ++step;
    newly.clear();
    survivors.clear();
    for (const std::uint32_t u : infected) {
      for (const std::uint32_t v : g.neighbors(u))
        if (state[v] == S && rng.bernoulli(params.beta_trans)) {
          state[v] = I;
          newly.push_back(v);
        }
    }
    for (const std::uint32_t u : infected) {
      if (rng.bernoulli(params.gamma)) {
        state[u] = R;
        ++recovered;
      } else {
        survivors.push_back(u);
      }
    }
    std::sort(newly.begin(), newly.end());
    merged.clear();
    std::merge(survivors.begin(), survivors.end(), newly.begin(), newly.end(),
               std::back_inserter(merged));
    infected.swap(merged);
    record();
  }
  result.duration_steps = step;
  result.final_recovered_fraction = static_cast<double>(recovered) / n;
  return result;
}

struct SweepPoint {
  double beta = 0.0;
  double lambda = 0.0;
  double mean_final_fraction = 0.0;
  double stderr_final_fraction = 0.0;
  std::uint32_t runs = 0;
};

// Mean final outbreak size against the effective rate lambda = beta/gamma.
// Run r of grid point b starts from one uniformly chosen node and uses
// sub-stream ((seed, b), r); points come back sorted by lambda.
inline std::vector<SweepPoint> outbreak_sweep(const Graph& g,
                                              std::span<const double> beta_grid,
                                              double gamma,
                                              std::uint32_t runs_per_point,
                                              std::uint64_t seed,
                                              std::uint32_t max_steps = 1000000) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw BadArgument("gamma must be in (0,1]");
  if (runs_per_point < 1) throw BadArgument("need at least one run per point");
  std::vector<SweepPoint> curve;
  curve.reserve(beta_grid.size());
  for (std::size_t b = 0; b < beta_grid.size(); ++b) {
    EpidemicParams params{beta_grid[b], gamma, 0.0};
    params.validate();
    const std::uint64_t point_seed = derive_seed(seed, b);
    double sum = 0.0, sum_sq = 0.0;
    for (std::uint32_t r = 0; r < runs_per_point; ++r) {
      const std::uint64_t run_seed = derive_seed(point_seed, r);
      const std::uint32_t start = static_cast<std::uint32_t>(
          SplitMix64(derive_seed(run_seed, 0)).next_below(g.node_count()));
      const std::uint32_t one_start[] = {start};
      const SirResult res =
          simulate_sir(g, params, one_start, max_steps, derive_seed(run_seed, 1));
      sum += res.final_recovered_fraction;
      sum_sq += res.final_recovered_fraction * res.final_recovered_fraction;
    }
    SweepPoint point;
    point.beta = beta_grid[b];
    point.lambda = beta_grid[b] / gamma;
    point.runs = runs_per_point;
    point.mean_final_fraction = sum / runs_per_point;
    if (runs_per_point > 1) {
      const double var = std::max(
          0.0, (sum_sq - sum * sum / runs_per_point) / (runs_per_point - 1.0));
      point.stderr_final_fraction = std::sqrt(var / runs_per_point);
    }
    curve.push_back(point);
  }
  std::sort(curve.begin(), curve.end(),
            [](const SweepPoint& a, const SweepPoint& b) { return a.lambda < b.lambda; });
  return curve;
}

}  // namespace detlim
