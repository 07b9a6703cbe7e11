#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "detlim/detlim_all.hpp"
#include "detlim/json_io.hpp"

namespace detlim::cli {

using io::json;

// ---- divergence command ----------------------------------------------------

inline json run_divergence(const Pmf& p, const Pmf& q, const MetricAlphabet* space) {
  const DivergenceReport report = divergence_report(p, q, space);
  const InequalityReport inequalities = check_inequalities(p, q, space);
  json config{{"p", io::to_json(p)}, {"q", io::to_json(q)}};
  if (space != nullptr) config["space"] = io::to_json(*space);
  json out = io::to_json(report);
  out["inequalities"] = io::to_json(inequalities);
  out["config"] = std::move(config);
  out["version"] = std::string(kVersion);
  return out;
}

// ---- table command ---------------------------------------------------------

struct TableJob {
  LKind l_kind = LKind::Kl;
  Regime regime = Regime::General;
  std::vector<double> opts;
  std::vector<std::int64_t> ns;
  std::vector<TestKind> tests = {TestKind::NeymanPearson, TestKind::Bayes};
  std::optional<double> p_g_star;
  std::optional<double> diam;
};

// CSV with one row per (test, opt, n), canonical order regardless of how the
// grids were given.
inline std::string run_table_csv(TableJob job) {
  std::sort(job.opts.begin(), job.opts.end());
  std::sort(job.ns.begin(), job.ns.end());
  std::ostringstream out;
  out << "l_kind,regime,test,opt,n,log_bound\n";
  for (const TestKind test : job.tests)
    for (const double opt : job.opts)
      for (const std::int64_t n : job.ns) {
        GanSpec spec{job.l_kind, opt, job.p_g_star, job.diam};
        const double lb = log_bound(spec, n, job.regime, test);
        out << to_string(job.l_kind) << ',' << to_string(job.regime) << ','
            << to_string(test) << ',' << io::format_double(opt) << ',' << n << ','
            << io::format_double(lb) << '\n';
      }
  return out.str();
}

// ---- hyptest command -------------------------------------------------------

struct HyptestJob {
  TestConfig base;
  std::vector<std::int64_t> n_grid;  // single entry when "n" was given
  std::vector<TestKind> tests = {TestKind::NeymanPearson, TestKind::Bayes};
  bool fit = false;                  // least-squares exponent fit over the grid
  std::optional<GanSpec> gan;        // fills predicted_log_bound
  Regime regime = Regime::General;
};

inline HyptestJob hyptest_job_from_json(const json& j) {
  io::require_keys(j, "hyptest config",
                   {"p_legit", "p_fake", "n", "n_grid", "alpha", "priors", "trials",
                    "seed", "tests", "fit", "gan", "regime"});
  if (j.contains("n") == j.contains("n_grid"))
    throw ParseError("hyptest config needs exactly one of 'n' and 'n_grid'");

  HyptestJob job;
  json base = j;
  base.erase("n_grid");
  base.erase("tests");
  base.erase("fit");
  base.erase("gan");
  base.erase("regime");
  if (!base.contains("n")) base["n"] = 1;
  job.base = io::test_config_from_json(base);

  if (j.contains("n_grid")) {
    job.n_grid = j["n_grid"].get<std::vector<std::int64_t>>();
    if (job.n_grid.empty()) throw ParseError("'n_grid' must be non-empty");
  } else {
    job.n_grid = {job.base.n};
  }
  if (j.contains("tests")) {
    job.tests.clear();
    for (const auto& t : j["tests"])
      job.tests.push_back(test_kind_from_string(t.get<std::string>()));
    if (job.tests.empty()) throw ParseError("'tests' must be non-empty");
  }
  job.fit = j.value("fit", job.n_grid.size() >= 4);
  if (j.contains("gan")) {
    json gan = j["gan"];
    if (gan.contains("regime")) {
      job.regime = regime_from_string(gan["regime"].get<std::string>());
      gan.erase("regime");
    }
    job.gan = io::gan_spec_from_json(gan);
  }
  return job;
}

inline json run_hyptest(const HyptestJob& job) {
  json results = json::array();
  json fits = json::object();
  for (const TestKind kind : job.tests) {
    std::vector<double> rates;
    for (const std::int64_t n : job.n_grid) {
      TestConfig cfg = job.base;
      cfg.n = n;
      cfg.seed = job.n_grid.size() > 1
                     ? derive_seed(job.base.seed, static_cast<std::uint64_t>(n))
                     : job.base.seed;
      const ErrorEstimate est =
          kind == TestKind::NeymanPearson ? np_test(cfg) : bayes_test(cfg);
      const double rate =
          kind == TestKind::NeymanPearson ? est.beta_hat : est.pe_hat;
      rates.push_back(rate);
      json row = io::to_json(est);
      row["n"] = n;
      row["test"] = to_string(kind);
      row["rate"] = io::json_number(rate);
      row["exponent"] =
          io::json_number(rate > 0 ? -std::log(rate) / static_cast<double>(n) : kInf);
      if (job.gan)
        row["predicted_log_bound"] =
            io::json_number(log_bound(*job.gan, n, job.regime, kind));
      results.push_back(std::move(row));
    }
    if (job.fit) {
      const ExponentFit fit = fit_exponent(job.n_grid, rates);
      fits[to_string(kind)] =
          json{{"slope", io::json_number(fit.slope)},
               {"r_squared", io::json_number(fit.r_squared)}};
    }
  }

  json config = io::to_json(job.base);
  config.erase("n");
  config["n_grid"] = job.n_grid;
  json out{{"version", std::string(kVersion)},
           {"config", std::move(config)},
           {"results", std::move(results)}};
  if (job.fit) out["fits"] = std::move(fits);
  if (job.gan) out["gan"] = io::to_json(*job.gan);
  return out;
}

inline std::string hyptest_csv(const json& report) {
  std::ostringstream out;
  out << "n,test,rate,halfwidth,predicted_log_bound,exponent\n";
  for (const auto& row : report.at("results")) {
    const auto number_or = [&](const char* key) -> std::string {
      if (!row.contains(key)) return "";
      const auto& v = row.at(key);
      return v.is_string() ? v.get<std::string>()
                           : io::format_double(v.get<double>());
    };
    out << row.at("n").get<std::int64_t>() << ',' << row.at("test").get<std::string>()
        << ',' << number_or("rate") << ',' << number_or("wilson_halfwidth") << ','
        << number_or("predicted_log_bound") << ',' << number_or("exponent") << '\n';
  }
  return out.str();
}

// ---- epidemic command ------------------------------------------------------

struct GraphSource {
  std::string kind;  // "er", "ba" or "file"
  std::uint32_t nodes = 0;
  double edge_prob = 0.0;
  std::uint32_t attach_m = 1;
  std::string path;
  std::uint64_t seed = 0;
};

struct EpidemicJob {
  GraphSource graph;
  std::vector<double> beta_grid;
  double gamma = 1.0;
  std::uint32_t runs_per_point = 100;
  std::uint64_t seed = 0;
  std::uint32_t max_steps = 1000000;
  std::string lambda_c_method = "hmf";  // or "spectral"
};

inline EpidemicJob epidemic_job_from_json(const json& j) {
  io::require_keys(j, "epidemic config",
                   {"graph", "beta_grid", "gamma", "runs_per_point", "seed",
                    "max_steps", "lambda_c_method"});
  EpidemicJob job;
  const json& g = io::require_field(j, "epidemic config", "graph");
  io::require_keys(g, "graph", {"kind", "nodes", "edge_prob", "attach_m", "path", "seed"});
  job.graph.kind = io::require_field(g, "graph", "kind").get<std::string>();
  if (job.graph.kind == "er") {
    job.graph.nodes = io::require_field(g, "graph", "nodes").get<std::uint32_t>();
    job.graph.edge_prob = io::require_field(g, "graph", "edge_prob").get<double>();
    job.graph.seed = g.value("seed", std::uint64_t{0});
  } else if (job.graph.kind == "ba") {
    job.graph.nodes = io::require_field(g, "graph", "nodes").get<std::uint32_t>();
    job.graph.attach_m = io::require_field(g, "graph", "attach_m").get<std::uint32_t>();
    job.graph.seed = g.value("seed", std::uint64_t{0});
  } else if (job.graph.kind == "file") {
    job.graph.path = io::require_field(g, "graph", "path").get<std::string>();
  } else {
    throw ParseError("graph kind must be 'er', 'ba' or 'file'");
  }
  job.beta_grid =
      io::require_field(j, "epidemic config", "beta_grid").get<std::vector<double>>();
  if (job.beta_grid.empty()) throw ParseError("'beta_grid' must be non-empty");
  job.gamma = io::require_field(j, "epidemic config", "gamma").get<double>();
  job.runs_per_point = j.value("runs_per_point", std::uint32_t{100});
  job.seed = j.value("seed", std::uint64_t{0});
  job.max_steps = j.value("max_steps", std::uint32_t{1000000});
  job.lambda_c_method = j.value("lambda_c_method", std::string("hmf"));
  if (job.lambda_c_method != "hmf" && job.lambda_c_method != "spectral")
    throw ParseError("lambda_c_method must be 'hmf' or 'spectral'");
  return job;
}

inline json to_json(const EpidemicJob& job) {
  json g{{"kind", job.graph.kind}};
  if (job.graph.kind == "er") {
    g["nodes"] = job.graph.nodes;
    g["edge_prob"] = job.graph.edge_prob;
    g["seed"] = job.graph.seed;
  } else if (job.graph.kind == "ba") {
    g["nodes"] = job.graph.nodes;
    g["attach_m"] = job.graph.attach_m;
    g["seed"] = job.graph.seed;
  } else {
    g["path"] = job.graph.path;
  }
  return json{{"graph", std::move(g)},
              {"beta_grid", job.beta_grid},
              {"gamma", job.gamma},
              {"runs_per_point", job.runs_per_point},
              {"seed", job.seed},
              {"max_steps", job.max_steps},
              {"lambda_c_method", job.lambda_c_method}};
}

inline Graph build_graph(const GraphSource& source) {
  if (source.kind == "er") return gen_er(source.nodes, source.edge_prob, source.seed);
  if (source.kind == "ba") return gen_ba(source.nodes, source.attach_m, source.seed);
  std::ifstream in(source.path);
  if (!in) throw ParseError("cannot open graph file '" + source.path + "'");
  return read_edge_list(in);
}

struct EpidemicOutput {
  std::vector<SweepPoint> curve;
  double lambda_c = 0.0;
};

inline EpidemicOutput run_epidemic(const EpidemicJob& job) {
  const Graph g = build_graph(job.graph);
  EpidemicOutput out;
  out.lambda_c = job.lambda_c_method == "hmf" ? mean_field_threshold(g)
                                              : spectral_threshold(g);
  out.curve = outbreak_sweep(g, job.beta_grid, job.gamma, job.runs_per_point,
                             job.seed, job.max_steps);
  return out;
}

inline std::string epidemic_csv(const EpidemicJob& job, const EpidemicOutput& out) {
  std::ostringstream os;
  os << "# detlim " << kVersion << " epidemic sweep\n";
  os << "# config: " << to_json(job).dump() << '\n';
  os << "# lambda_c: " << io::format_double(out.lambda_c) << " (method: "
     << job.lambda_c_method << ")\n";
  os << "lambda,mean_fraction,stderr,runs\n";
  for (const auto& point : out.curve)
    os << io::format_double(point.lambda) << ','
       << io::format_double(point.mean_final_fraction) << ','
       << io::format_double(point.stderr_final_fraction) << ',' << point.runs << '\n';
  return os.str();
}

}  // namespace detlim::cli
