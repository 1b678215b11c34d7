// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "jbas/experiment.hpp"

using namespace jbas;
using nlohmann::json;

namespace {

json small_config() {
  return json::parse(R"({
    "scenario": {"N": 3, "rate_target_bps": 2e6},
    "algorithm": {"name": "alg1", "max_iter": 8},
    "seeds": [4, 5]
  })");
}

RunRecord fake_run(int point, std::uint64_t seed, RunStatus st, double ee, double sr) {
  RunRecord r;
  r.point = point;
  r.seed = seed;
  r.result.status = st;
  r.result.ee = ee;
  r.result.sum_rate = sr;
  r.result.selection.mask = {true, true, false};
  r.result.selection.a = Eigen::Vector3d(1, 1, 0);
  return r;
}

}  // namespace

TEST_CASE("defaults follow the simulation table and round-trip through JSON") {
  const ExperimentConfig c = experiment_config_from_json(json::object());
  CHECK(c.scenario.num_bs == 2);
  CHECK(c.scenario.antennas_per_bs == 16);
  CHECK(c.scenario.rate_target_bps == 20e6);
  CHECK(c.algorithm == "alg1");
  CHECK(c.seeds.size() == 20);
  const ExperimentConfig again = experiment_config_from_json(c.to_json());
  CHECK(again.to_json() == c.to_json());
  CHECK(config_hash(again) == config_hash(c));
}

TEST_CASE("strict parsing rejects unknown or malformed entries") {
  auto bad = [](const char* text) {
    CHECK_THROWS_AS(experiment_config_from_json(json::parse(text)), ConfigError);
  };
  bad(R"({"scenaro": {}})");
  bad(R"({"scenario": {"Nt": 4}})");
  bad(R"({"scenario": {"power": {"p_rff": 1}}})");
  bad(R"({"algorithm": {"name": "alg9"}})");
  bad(R"({"algorithm": {"chi": "two"}})");
  bad(R"({"algorithm": {"backend": "mosek"}})");
  bad(R"({"algorithm": {"kappa": 2}})");
  bad(R"({"scenario": {"placement": "grid"}})");
  bad(R"({"scenario": {"N": 1, "U": 2}})");
  bad(R"({"sweep": {"parameter": "eta", "values": [1]}})");
  bad(R"({"sweep": {"parameter": "N", "values": []}})");
  bad(R"({"sweep": {"parameter": "N", "values": ["many"]}})");
  bad(R"({"seeds": []})");
  bad(R"({"seeds": {"count": 0}})");
  bad(R"({"seeds": [-1]})");
}

TEST_CASE("empty seed list fails before anything runs") {
  ExperimentConfig c = experiment_config_from_json(small_config());
  c.seeds.clear();
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
}

TEST_CASE("config hash changes exactly when a field changes") {
  const ExperimentConfig base = experiment_config_from_json(small_config());
  CHECK(config_hash(base) == config_hash(experiment_config_from_json(small_config())));
  CHECK(config_hash(base).size() == 16);
  std::vector<ExperimentConfig> variants(8, base);
  variants[0].scenario.antennas_per_bs = 4;
  variants[1].scenario.power.p_rf = 0.41;
  variants[2].options.chi = 3;
  variants[3].options.kappa = 0.5;
  variants[4].seeds.push_back(6);
  variants[5].algorithm = "alg3";
  variants[6].sigma_e2 = 0.1;
  variants[7].sweep.push_back({"N", {3, 4}});
  for (const auto& v : variants) CHECK(config_hash(v) != config_hash(base));
}

TEST_CASE("an algorithm by N sweep expands to the full product") {
  json j = small_config();
  j["sweep"] = json::parse(R"([
    {"parameter": "algorithm", "values": ["alg1", "alg1-simple", "alg2-f1", "alg2-f2", "alg2-f3", "no-as"]},
    {"parameter": "N", "values": [8, 12, 16]}])");
  const ExperimentConfig c = experiment_config_from_json(j);
  const auto pts = expand_sweep(c);
  REQUIRE(pts.size() == 18);
  CHECK(pts[0].algorithm == Algorithm::alg1);
  CHECK(pts[0].scenario.antennas_per_bs == 8);
  CHECK(pts[2].scenario.antennas_per_bs == 16);
  CHECK(pts[3].algorithm == Algorithm::alg1_simple);
  CHECK(pts[17].algorithm == Algorithm::no_as);
  CHECK(pts[17].label() == "algorithm=no-as;N=16");
  for (int i = 0; i < 18; ++i) CHECK(pts[i].index == i);
}

TEST_CASE("explicit sweep points expand in listed order") {
  json j = small_config();
  j["sweep"] = json::parse(R"({"points": [
    {"algorithm": "pwee", "kappa": 0}, {"algorithm": "pwee", "kappa": 1},
    {"algorithm": "alg3", "varrho": 2}]})");
  const ExperimentConfig c = experiment_config_from_json(j);
  const auto pts = expand_sweep(c);
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].algorithm == Algorithm::pwee);
  CHECK(pts[0].options.kappa == 0.0);
  CHECK(pts[1].options.kappa == 1.0);
  CHECK(pts[2].algorithm == Algorithm::alg3);
  CHECK(pts[2].options.varrho == 2.0);
  CHECK(pts[2].options.kappa == 1.0);
  CHECK(experiment_config_from_json(c.to_json()).to_json() == c.to_json());

  j["sweep"] = json::parse(R"({"points": [{"kapa": 0}]})");
  CHECK_THROWS_AS(experiment_config_from_json(j), ConfigError);
  j["sweep"] = json::parse(R"({"points": []})");
  CHECK_THROWS_AS(experiment_config_from_json(j), ConfigError);
  j["sweep"] = json::parse(R"({"points": [{"kappa": 0}], "parameter": "N"})");
  CHECK_THROWS_AS(experiment_config_from_json(j), ConfigError);
}

TEST_CASE("aggregation excludes unusable runs and notes them") {
  ExperimentResult r;
  r.points.resize(1);
  r.runs = {fake_run(0, 0, RunStatus::converged, 2.0, 10.0), fake_run(0, 1, RunStatus::iteration_limit, 4.0, 30.0),
            fake_run(0, 2, RunStatus::infeasible, 100.0, 100.0), fake_run(0, 3, RunStatus::solver_failure, 0, 0)};
  r.infeasible = 1;
  r.failures = 1;
  const auto rows = aggregate(r);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].total == 4);
  CHECK(rows[0].used == 2);
  CHECK(rows[0].mean_ee == doctest::Approx(3.0));
  CHECK(rows[0].stderr_ee == doctest::Approx(1.0));
  CHECK(rows[0].mean_sum_rate == doctest::Approx(20.0));
  CHECK(rows[0].mean_active == 2.0);
  CHECK(rows[0].note.find("1 infeasible") != std::string::npos);
  CHECK(r.exit_code() == 4);
  r.failures = 0;
  CHECK(r.exit_code() == 3);
  r.infeasible = 0;
  CHECK(r.exit_code() == 0);
}

TEST_CASE("trade-off rows are grouped by control and sorted by value") {
  ExperimentResult r;
  const std::vector<std::pair<std::string, double>> axis = {
      {"varrho", 2.0}, {"kappa", 1.0}, {"kappa", 0.0}, {"varrho", 0.0}, {"kappa", 0.5}};
  for (std::size_t i = 0; i < axis.size(); ++i) {
    SweepPoint p;
    p.index = static_cast<int>(i);
    p.algorithm = axis[i].first == "kappa" ? Algorithm::pwee : Algorithm::alg3;
    p.values = {{axis[i].first, axis[i].second}};
    r.points.push_back(p);
    r.runs.push_back(fake_run(p.index, 0, RunStatus::converged, 1.0 + static_cast<double>(i), 1.0));
  }
  std::ostringstream os;
  write_tradeoff_csv(r, os);
  CHECK(os.str() ==
        "curve,control,value,mean_ee_bits_per_joule,mean_sum_rate_bps,mean_active_antennas\n"
        "pwee,kappa,0,3,1,2\n"
        "pwee,kappa,0.5,5,1,2\n"
        "pwee,kappa,1,2,1,2\n"
        "alg3,varrho,0,4,1,2\n"
        "alg3,varrho,2,1,1,2\n");

  // a kappa value on a non-PWEE point is not a trade-off control
  SweepPoint extra;
  extra.index = static_cast<int>(r.points.size());
  extra.algorithm = Algorithm::alg1;
  extra.values = {{"kappa", 0.3}};
  r.points.push_back(extra);
  r.runs.push_back(fake_run(extra.index, 0, RunStatus::converged, 9.0, 1.0));
  std::ostringstream again;
  write_tradeoff_csv(r, again);
  CHECK(again.str() == os.str());

  std::ostringstream none;
  ExperimentResult plain;
  plain.points.resize(1);
  write_tradeoff_csv(plain, none);
  const std::string header_only = none.str();
  CHECK(std::count(header_only.begin(), header_only.end(), '\n') == 1);
}

TEST_CASE("rerunning a configuration reproduces the CSV bodies") {
  json j = small_config();
  j["sweep"] = json::parse(R"({"parameter": "algorithm", "values": ["alg1", "pwee"]})");
  j["threads"] = 1;
  const ExperimentConfig one = experiment_config_from_json(j);
  j["threads"] = 2;
  const ExperimentConfig two = experiment_config_from_json(j);
  const ExperimentResult a = run_experiment(one);
  const ExperimentResult b = run_experiment(two);
  REQUIRE(a.runs.size() == 4);
  for (auto writer : {write_traces_csv, write_results_csv, write_summary_csv}) {
    std::ostringstream x, y;
    writer(a, x);
    writer(b, y);
    CHECK(strip_timing_columns(x.str()) == strip_timing_columns(y.str()));
  }
  std::ostringstream t;
  write_traces_csv(a, t);
  CHECK(t.str().rfind(
            "point,seed,iter,phase,objective,ee_bits_per_joule,sum_rate_bps,power_w,active_antennas,solve_ms\n", 0) ==
        0);
  // PWEE at its default weight is the same algorithm as alg1
  const auto rows = aggregate(a);
  CHECK(rows[0].mean_ee == rows[1].mean_ee);
  for (const auto& row : rows) {
    CHECK(row.mean_active >= 2.0);
    CHECK(row.mean_active <= 6.0);
  }
}

TEST_CASE("timing columns are stripped wherever they appear") {
  CHECK(strip_timing_columns("a,solve_ms,b\n1,2.5,3\n4,,6\n") == "a,b\n1,3\n4,6\n");
  CHECK(strip_timing_columns("solve_ms,x\n9,1\n") == ",x\n,1\n");
}

TEST_CASE("manifest records hash, seed count and exclusions") {
  ExperimentConfig c = experiment_config_from_json(small_config());
  ExperimentResult r;
  r.points = expand_sweep(c);
  r.runs = {fake_run(0, 4, RunStatus::converged, 1, 1), fake_run(0, 5, RunStatus::infeasible, 0, 0)};
  r.infeasible = 1;
  const json m = manifest(c, r);
  CHECK(m.at("config_hash") == config_hash(c));
  CHECK(m.at("seed_count") == 2);
  CHECK(m.at("excluded").size() == 1);
  CHECK(m.at("exit_code") == 3);
  CHECK(m.at("config") == c.to_json());
}
