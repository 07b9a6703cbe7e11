#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "detlim/bounds.hpp"
#include "detlim/common.hpp"
#include "detlim/divergence.hpp"
#include "detlim/hyptest.hpp"
#include "detlim/pmf.hpp"

namespace detlim::io {

using json = nlohmann::json;

// Shortest round-trip decimal form; used everywhere a double reaches an
// output file so re-runs are byte-identical.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

// Non-finite values cannot be JSON numbers; they serialize as strings.
inline json json_number(double x) {
  if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
  if (std::isnan(x)) return json("nan");
  return json(x);
}

inline void require_keys(const json& j, const std::string& context,
                         std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ParseError(context + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) { known = true; break; }
    if (!known) throw ParseError("unknown field '" + key + "' in " + context);
  }
}

inline const json& require_field(const json& j, const std::string& context,
                                 const char* name) {
  const auto it = j.find(name);
  if (it == j.end()) throw ParseError("missing field '" + std::string(name) +
                                      "' in " + context);
  return *it;
}

inline json to_json(const Pmf& pmf) {
  return json{{"labels", pmf.labels()}, {"probs", pmf.probs()}};
}

inline Pmf pmf_from_json(const json& j, const std::string& context = "pmf") {
  require_keys(j, context, {"labels", "probs"});
  const auto& labels = require_field(j, context, "labels");
  const auto& probs = require_field(j, context, "probs");
  if (!labels.is_array() || !probs.is_array())
    throw ParseError("'labels' and 'probs' must be arrays in " + context);
  try {
    return make_pmf(probs.get<std::vector<double>>(),
                    labels.get<std::vector<std::string>>());
  } catch (const json::exception& e) {
    throw ParseError(context + ": " + e.what());
  }
}

inline json to_json(const MetricAlphabet& space) {
  return json{{"labels", space.labels()}, {"positions", space.positions()}};
}

inline MetricAlphabet metric_from_json(const json& j,
                                       const std::string& context = "space") {
  require_keys(j, context, {"labels", "positions"});
  try {
    return MetricAlphabet(
        require_field(j, context, "labels").get<std::vector<std::string>>(),
        require_field(j, context, "positions").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ParseError(context + ": " + e.what());
  }
}

inline json to_json(const ImageModel& model) {
  json patches = json::array();
  for (const auto& patch : model.patches())
    patches.push_back(json{{"m", patch.pixel_count},
                           {"pmf_legit", to_json(patch.pmf_legit)},
                           {"pmf_fake", to_json(patch.pmf_fake)}});
  return json{{"patches", patches}, {"m_large_enough", model.m_large_enough()}};
}

inline ImageModel image_model_from_json(const json& j) {
  require_keys(j, "image model", {"patches", "m_large_enough"});
  const auto& patches_json = require_field(j, "image model", "patches");
  if (!patches_json.is_array() || patches_json.empty())
    throw ParseError("'patches' must be a non-empty array");
  std::vector<ImagePatch> patches;
  for (const auto& pj : patches_json) {
    require_keys(pj, "patch", {"m", "pmf_legit", "pmf_fake"});
    ImagePatch patch;
    patch.pixel_count = require_field(pj, "patch", "m").get<std::int64_t>();
    patch.pmf_legit = pmf_from_json(require_field(pj, "patch", "pmf_legit"), "pmf_legit");
    patch.pmf_fake = pmf_from_json(require_field(pj, "patch", "pmf_fake"), "pmf_fake");
    patches.push_back(std::move(patch));
  }
  const bool declared = j.value("m_large_enough", false);
  return ImageModel(std::move(patches), declared);
}

inline json to_json(const DivergenceReport& report) {
  json j{{"kl_forward", json_number(report.kl_forward)},
         {"tv", json_number(report.tv)},
         {"js", json_number(report.js)},
         {"chernoff", json_number(report.chernoff)},
         {"chernoff_lambda", json_number(report.chernoff_lambda)}};
  if (report.wasserstein) j["wasserstein"] = json_number(*report.wasserstein);
  return j;
}

inline json to_json(const BoundReport& report) {
  json j{{"regime", to_string(report.regime)},
         {"test", to_string(report.test)},
         {"n", report.n},
         {"l_kind", to_string(report.spec.l_kind)},
         {"opt", report.spec.opt},
         {"bound", json_number(report.bound)},
         {"log_bound", json_number(report.log_bound)}};
  if (report.spec.p_g_star) j["p_g_star"] = *report.spec.p_g_star;
  if (report.spec.diam) j["diam"] = *report.spec.diam;
  return j;
}

inline json to_json(const InequalityCheck& check) {
  return json{{"evaluated", check.evaluated},
              {"lhs", json_number(check.lhs)},
              {"rhs", json_number(check.rhs)},
              {"slack", json_number(check.slack())},
              {"holds", check.holds()}};
}

inline json to_json(const InequalityReport& report) {
  return json{{"pinsker", to_json(report.pinsker)},
              {"reverse_pinsker", to_json(report.reverse_pinsker)},
              {"js_vs_tv", to_json(report.js_vs_tv)},
              {"wasserstein_vs_tv", to_json(report.wasserstein_vs_tv)}};
}

inline GanSpec gan_spec_from_json(const json& j) {
  require_keys(j, "gan spec", {"l_kind", "opt", "p_g_star", "diam"});
  GanSpec spec;
  spec.l_kind = l_kind_from_string(
      require_field(j, "gan spec", "l_kind").get<std::string>());
  spec.opt = require_field(j, "gan spec", "opt").get<double>();
  if (j.contains("p_g_star")) spec.p_g_star = j["p_g_star"].get<double>();
  if (j.contains("diam")) spec.diam = j["diam"].get<double>();
  spec.validate();
  return spec;
}

inline json to_json(const GanSpec& spec) {
  json j{{"l_kind", to_string(spec.l_kind)}, {"opt", spec.opt}};
  if (spec.p_g_star) j["p_g_star"] = *spec.p_g_star;
  if (spec.diam) j["diam"] = *spec.diam;
  return j;
}

inline TestConfig test_config_from_json(const json& j) {
  require_keys(j, "test config",
               {"p_legit", "p_fake", "n", "alpha", "priors", "trials", "seed"});
  TestConfig cfg;
  cfg.p_legit = pmf_from_json(require_field(j, "test config", "p_legit"), "p_legit");
  cfg.p_fake = pmf_from_json(require_field(j, "test config", "p_fake"), "p_fake");
  cfg.n = j.value("n", std::int64_t{1});
  cfg.alpha = j.value("alpha", 0.05);
  if (j.contains("priors")) {
    const auto priors = j["priors"].get<std::vector<double>>();
    if (priors.size() != 2) throw ParseError("'priors' must have two entries");
    cfg.priors = {priors[0], priors[1]};
  }
  cfg.trials = j.value("trials", std::int64_t{10000});
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.validate();
  return cfg;
}

inline json to_json(const TestConfig& cfg) {
  return json{{"p_legit", to_json(cfg.p_legit)}, {"p_fake", to_json(cfg.p_fake)},
              {"n", cfg.n},                      {"alpha", cfg.alpha},
              {"priors", cfg.priors},            {"trials", cfg.trials},
              {"seed", cfg.seed}};
}

inline json to_json(const ErrorEstimate& est) {
  return json{{"alpha_hat", json_number(est.alpha_hat)},
              {"beta_hat", json_number(est.beta_hat)},
              {"pe_hat", json_number(est.pe_hat)},
              {"wilson_halfwidth", json_number(est.wilson_halfwidth)},
              {"trials", est.trials},
              {"threshold", json_number(est.threshold)},
              {"degenerate", est.degenerate}};
}

}  // namespace detlim::io
