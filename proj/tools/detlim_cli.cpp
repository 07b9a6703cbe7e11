// detlim: divergences, detectability bound tables, Monte Carlo hypothesis
// tests and SIR containment sweeps from the command line. All outputs are
// deterministic functions of the inputs; re-running a command reproduces the
// output byte for byte.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "detlim/cli.hpp"
#include "detlim/detlim_all.hpp"
#include "detlim/json_io.hpp"

namespace {

using detlim::io::json;

json read_json_file(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw detlim::ParseError("cannot open " + what + " file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw detlim::ParseError(what + " '" + path + "': " + e.what());
  }
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw detlim::Error("IoError", "cannot write '" + out_path + "'");
  out << text;
}

// DETLIM_SEED takes precedence over both config files and --seed.
std::optional<std::uint64_t> env_seed() {
  const char* value = std::getenv("DETLIM_SEED");
  if (value == nullptr) return std::nullopt;
  return std::strtoull(value, nullptr, 10);
}

struct CommonFlags {
  std::string out;
  std::string format = "json";
};

int cmd_divergence(const std::string& p_path, const std::string& q_path,
                   const std::string& space_path, const CommonFlags& flags) {
  const detlim::Pmf p = detlim::io::pmf_from_json(read_json_file(p_path, "pmf"), "p");
  const detlim::Pmf q = detlim::io::pmf_from_json(read_json_file(q_path, "pmf"), "q");
  std::optional<detlim::MetricAlphabet> space;
  if (!space_path.empty())
    space = detlim::io::metric_from_json(read_json_file(space_path, "space"));
  const json report =
      detlim::cli::run_divergence(p, q, space ? &*space : nullptr);
  write_output(report.dump(2) + "\n", flags.out);
  return 0;
}

int cmd_table(const detlim::cli::TableJob& job, const CommonFlags& flags) {
  write_output(detlim::cli::run_table_csv(job), flags.out);
  return 0;
}

int cmd_hyptest(const std::string& config_path, const CommonFlags& flags,
                const std::optional<std::uint64_t>& seed,
                const std::optional<std::int64_t>& trials,
                const std::optional<std::int64_t>& n,
                const std::optional<double>& alpha,
                const std::vector<double>& priors) {
  detlim::cli::HyptestJob job =
      detlim::cli::hyptest_job_from_json(read_json_file(config_path, "config"));
  if (seed) job.base.seed = *seed;
  if (auto es = env_seed()) job.base.seed = *es;
  if (trials) job.base.trials = *trials;
  if (n) {
    job.base.n = *n;
    job.n_grid = {*n};
  }
  if (alpha) job.base.alpha = *alpha;
  if (!priors.empty()) {
    if (priors.size() != 2) throw detlim::BadArgument("--priors needs two values");
    job.base.priors = {priors[0], priors[1]};
  }
  job.base.validate();
  const json report = detlim::cli::run_hyptest(job);
  if (flags.format == "csv")
    write_output(detlim::cli::hyptest_csv(report), flags.out);
  else
    write_output(report.dump(2) + "\n", flags.out);
  return 0;
}

int cmd_epidemic(const std::string& config_path, const CommonFlags& flags,
                 const std::optional<std::uint64_t>& seed,
                 const std::vector<double>& beta, const std::optional<double>& gamma,
                 const std::string& lambda_c_method, const std::string& graph_kind) {
  detlim::cli::EpidemicJob job =
      detlim::cli::epidemic_job_from_json(read_json_file(config_path, "config"));
  if (seed) job.seed = *seed;
  if (auto es = env_seed()) job.seed = *es;
  if (!beta.empty()) job.beta_grid = beta;
  if (gamma) job.gamma = *gamma;
  if (!lambda_c_method.empty()) {
    if (lambda_c_method != "hmf" && lambda_c_method != "spectral")
      throw detlim::BadArgument("--lambda-c-method must be hmf or spectral");
    job.lambda_c_method = lambda_c_method;
  }
  if (!graph_kind.empty()) job.graph.kind = graph_kind;
  const detlim::cli::EpidemicOutput out = detlim::cli::run_epidemic(job);
  write_output(detlim::cli::epidemic_csv(job, out), flags.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"detection-limit toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;

  // divergence
  auto* divergence = app.add_subcommand(
      "divergence", "distances, Chernoff information and inequality slacks");
  std::string p_path, q_path, space_path;
  divergence->add_option("--p", p_path, "pmf JSON for the legitimate side")->required();
  divergence->add_option("--q", q_path, "pmf JSON for the generated side")->required();
  divergence->add_option("--space", space_path, "metric alphabet JSON");
  divergence->add_option("--out", flags.out, "output path (default stdout)");
  divergence->add_option("--format", flags.format, "json")
      ->check(CLI::IsMember({"json"}));

  // table
  auto* table = app.add_subcommand("table", "error-bound table as CSV");
  std::string l_kind_str = "kl", regime_str = "general";
  std::vector<double> opts;
  std::vector<std::int64_t> ns;
  std::vector<std::string> test_strs;
  double pg_star = -1.0, diam = -1.0;
  table->add_option("--l-kind", l_kind_str, "kl|tv|js|wasserstein")->required();
  table->add_option("--regime", regime_str, "general|euclidean");
  table->add_option("--opt", opts, "oracle error grid")->required()->delimiter(',');
  table->add_option("--n", ns, "pixel count grid")->required()->delimiter(',');
  table->add_option("--test", test_strs, "np|bayes (default both)")->delimiter(',');
  table->add_option("--pg-star", pg_star, "min generated mass (Bayesian KL bound)");
  table->add_option("--diam", diam, "space diameter (Wasserstein)");
  table->add_option("--out", flags.out, "output path (default stdout)");

  // hyptest
  auto* hyptest = app.add_subcommand("hyptest", "Monte Carlo error rates");
  std::string hyptest_config;
  std::optional<std::uint64_t> seed_flag;
  std::optional<std::int64_t> trials_flag, n_flag;
  std::optional<double> alpha_flag;
  std::vector<double> priors_flag;
  hyptest->add_option("--config", hyptest_config, "experiment config JSON")->required();
  hyptest->add_option("--seed", seed_flag, "override config seed");
  hyptest->add_option("--trials", trials_flag, "override trial count");
  hyptest->add_option("--n", n_flag, "override pixel count");
  hyptest->add_option("--alpha", alpha_flag, "override false-alarm budget");
  hyptest->add_option("--priors", priors_flag, "override priors pi0,pi1")->delimiter(',');
  hyptest->add_option("--out", flags.out, "output path (default stdout)");
  hyptest->add_option("--format", flags.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));

  // epidemic
  auto* epidemic = app.add_subcommand("epidemic", "SIR outbreak sweep as CSV");
  std::string epidemic_config, lambda_c_method, graph_kind;
  std::vector<double> beta_flag;
  std::optional<double> gamma_flag;
  epidemic->add_option("--config", epidemic_config, "sweep config JSON")->required();
  epidemic->add_option("--seed", seed_flag, "override config seed");
  epidemic->add_option("--beta", beta_flag, "override transmission grid")->delimiter(',');
  epidemic->add_option("--gamma", gamma_flag, "override recovery probability");
  epidemic->add_option("--lambda-c-method", lambda_c_method, "hmf|spectral");
  epidemic->add_option("--graph", graph_kind, "er|ba|file")
      ->check(CLI::IsMember({"er", "ba", "file"}));
  epidemic->add_option("--out", flags.out, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (divergence->parsed())
      return cmd_divergence(p_path, q_path, space_path, flags);
    if (table->parsed()) {
      detlim::cli::TableJob job;
      job.l_kind = detlim::l_kind_from_string(l_kind_str);
      job.regime = detlim::regime_from_string(regime_str);
      job.opts = opts;
      job.ns = ns;
      if (!test_strs.empty()) {
        job.tests.clear();
        for (const auto& t : test_strs)
          job.tests.push_back(detlim::test_kind_from_string(t));
      }
      if (pg_star >= 0.0) job.p_g_star = pg_star;
      if (diam >= 0.0) job.diam = diam;
      return cmd_table(job, flags);
    }
    if (hyptest->parsed())
      return cmd_hyptest(hyptest_config, flags, seed_flag, trials_flag, n_flag,
                         alpha_flag, priors_flag);
    return cmd_epidemic(epidemic_config, flags, seed_flag, beta_flag, gamma_flag,
                        lambda_c_method, graph_kind);
  } catch (const detlim::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const detlim::AlphabetMismatch& e) {
    std::cerr << e.what() << '\n';
    return 3;
  } catch (const detlim::SpaceMismatch& e) {
    std::cerr << e.what() << '\n';
    return 3;
  } catch (const detlim::MissingDiam& e) {
    std::cerr << e.what() << '\n';
    return 4;
  } catch (const detlim::MissingPgStar& e) {
    std::cerr << e.what() << '\n';
    return 4;
  } catch (const detlim::Error& e) {
    std::cerr << e.what() << '\n';
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "Unexpected: " << e.what() << '\n';
    return 5;
  }
}
