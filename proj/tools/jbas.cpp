// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Exit codes: 0 success, 2 configuration error,
// 3 some seeds infeasible, 4 solver failures.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "jbas/experiment.hpp"
#include "jbas/oracle.hpp"

using nlohmann::json;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> algorithm, backend;
  std::optional<std::uint64_t> seed;
  std::optional<int> seeds, max_iter, threads;
  std::optional<double> chi, rho, varsigma, kappa, varrho, epsilon, tol;
};

json merged_config(const Overrides& o) {
  json j = o.config.empty() ? json::object() : jbas::load_json_file(o.config);
  if (!j.is_object()) throw jbas::ConfigError("configuration root must be an object");
  auto alg = [&]() -> json& {
    if (!j.contains("algorithm")) j["algorithm"] = json::object();
    return j["algorithm"];
  };
  if (o.algorithm) alg()["name"] = *o.algorithm;
  if (o.backend) alg()["backend"] = *o.backend;
  if (o.chi) alg()["chi"] = *o.chi;
  if (o.rho) alg()["rho"] = *o.rho;
  if (o.varsigma) alg()["varsigma"] = *o.varsigma;
  if (o.kappa) alg()["kappa"] = *o.kappa;
  if (o.varrho) alg()["varrho"] = *o.varrho;
  if (o.epsilon) alg()["epsilon"] = *o.epsilon;
  if (o.tol) alg()["rel_tol"] = *o.tol;
  if (o.max_iter) alg()["max_iter"] = *o.max_iter;
  if (o.seed) j["seeds"] = json::array({*o.seed});
  if (o.seeds) {
    json s = {{"count", *o.seeds}};
    if (j.contains("seeds") && j["seeds"].is_object() && j["seeds"].contains("base")) s["base"] = j["seeds"]["base"];
    j["seeds"] = s;
  }
  if (o.threads) j["threads"] = *o.threads;
  return j;
}

void add_common(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config, "JSON experiment configuration")->check(CLI::ExistingFile);
  app.add_option("--algorithm", o.algorithm, "alg1, alg1-simple, alg2-f1, alg2-f2, alg2-f3, pwee, alg3 or no-as");
  app.add_option("--seed", o.seed, "run a single seed");
  app.add_option("--seeds", o.seeds, "number of consecutive seeds");
  app.add_option("--chi", o.chi, "selection exponent");
  app.add_option("--rho", o.rho, "sparsity weight");
  app.add_option("--varsigma", o.varsigma, "smoothing parameter of f2/f3");
  app.add_option("--kappa", o.kappa, "PWEE weight in [0, 1]");
  app.add_option("--varrho", o.varrho, "sum-rate weight of the scalarization");
  app.add_option("--epsilon", o.epsilon, "rounding threshold");
  app.add_option("--max-iter", o.max_iter, "outer iteration cap");
  app.add_option("--tol", o.tol, "relative stopping tolerance");
  app.add_option("--backend", o.backend, "rate rows")->check(CLI::IsMember({"socp", "generic"}));
  app.add_option("--threads", o.threads, "worker threads, 0 for all cores");
}

int run_main(const Overrides& o, const std::string& out, bool dump) {
  const jbas::ExperimentConfig cfg = jbas::experiment_config_from_json(merged_config(o));
  const std::string dump_dir = dump ? out + "/programs" : std::string{};
  const jbas::ExperimentResult r = jbas::run_experiment(cfg, dump_dir);
  jbas::write_outputs(cfg, r, out);
  for (const auto& row : jbas::aggregate(r))
    std::cout << row.label << " [" << row.algorithm << "]  EE " << row.mean_ee / 1e6 << " Mbit/J  SR "
              << row.mean_sum_rate / 1e6 << " Mbit/s  active " << row.mean_active << "  (" << row.used << "/"
              << row.total << " seeds)" << (row.note.empty() ? "" : "  " + row.note) << '\n';
  std::cout << "outputs in " << out << " (config " << jbas::config_hash(cfg) << ")\n";
  return r.exit_code();
}

int run_oracle(const Overrides& o, const std::string& out, int restarts) {
  const jbas::ExperimentConfig cfg = jbas::experiment_config_from_json(merged_config(o));
  if (!cfg.sweep.empty() || !cfg.points.empty()) throw jbas::ConfigError("the oracle does not take a sweep");
  std::filesystem::create_directories(out);
  int code = 0;
  for (std::uint64_t seed : cfg.seeds) {
    const jbas::Scenario s = jbas::generate_scenario(cfg.scenario, seed);
    const jbas::OracleReport rep = jbas::exhaustive_antenna_search(s, cfg.options, restarts);
    const jbas::JbasResult r = jbas::run_algorithm(jbas::algorithm_from_string(cfg.algorithm), s, cfg.options);
    std::ofstream f(out + "/oracle_s" + std::to_string(seed) + ".csv");
    jbas::write_oracle_csv(rep, f);
    std::cout << "seed " << seed << "  oracle " << rep.best_ee / 1e6 << " Mbit/J  " << cfg.algorithm << " "
              << r.ee / 1e6 << " Mbit/J  ratio " << rep.ratio(r) << '\n';
    if (r.status == jbas::RunStatus::infeasible && code == 0) code = 3;
    if (r.status == jbas::RunStatus::solver_failure) code = 4;
  }
  return code;
}

int run_bounds(int samples, std::uint64_t seed) {
  const jbas::BoundCheckReport rep = jbas::check_bounds(samples, seed);
  std::cout << rep.checks << " checks over " << rep.samples << " samples, worst value gap " << rep.max_value_gap
            << ", worst gradient gap " << rep.max_gradient_gap << '\n';
  for (const auto& f : rep.failures) std::cout << "  " << f << '\n';
  return rep.passed() ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficient joint beamforming and antenna selection"};
  Overrides o;
  std::string out = "out";
  bool dump = false;
  add_common(app, o);
  app.add_option("--out", out, "output directory");
  app.add_flag("--dump-programs", dump, "write the first subproblem of each run in triplet form");

  auto* oracle = app.add_subcommand("oracle", "exhaustive antenna-subset search on tiny instances");
  int restarts = 3;
  oracle->add_option("--restarts", restarts, "random starts per subset")->check(CLI::PositiveNumber);

  auto* bounds = app.add_subcommand("bounds", "randomized check of the surrogate bounds");
  int samples = 1000;
  std::uint64_t bound_seed = 1;
  bounds->add_option("--samples", samples, "random cases per bound")->check(CLI::PositiveNumber);
  bounds->add_option("--seed", bound_seed, "sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (*bounds) return run_bounds(samples, bound_seed);
    if (*oracle) return run_oracle(o, out, restarts);
    return run_main(o, out, dump);
  } catch (const jbas::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
