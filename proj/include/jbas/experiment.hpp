// SPDX-License-Identifier: Apache-2.0
//
// Experiment harness behind the command-line tool: strict JSON configuration,
// seed and sweep expansion, parallel dispatch and CSV/manifest emission.
//
// Configuration schema (every key optional, unknown keys rejected):
//
//   {
//     "scenario":  { "B": 2, "N": 16, "U": 2, "L": 2, "placement": "fixed",
//                    "distance_m": 250, "min_distance_m": 35,
//                    "rate_target_bps": 20e6, "sigma_e2": 0,
//                    "power": { "eta": 0.35, "p_rf": 0.4, "p_sta": 4.5, "p_ue": 0.1,
//                               "p_max": 1, "n0_dbw": -125, "bandwidth_hz": 20e6 } },
//     "algorithm": { "name": "alg1", "chi": 2, "epsilon": 1e-3, "max_iter": 50,
//                    "rel_tol": 1e-4, "solver_tol": 1e-10, "backend": "socp",
//                    "min_antennas": true, "kappa": 1, "varrho": 0, "rho": 0, "varsigma": 2 },
//     "sweep":     [ { "parameter": "N", "values": [8, 12, 16] } ],
//     "seeds":     { "count": 20, "base": 0 }   or   [0, 1, 2],
//     "threads":   0
//   }
//
// "sweep" may also be a single object; several axes form a Cartesian
// product. Alternatively { "points": [ {"algorithm": "pwee", "kappa": 0}, ... ] }
// lists the combinations explicitly. Sweepable parameters: algorithm, B, N,
// U, L, rate_target_bps, distance_m, chi, epsilon, max_iter, kappa, varrho,
// rho, varsigma.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "jbas/algorithms.hpp"

namespace jbas {

struct SweepAxis {
  std::string parameter;
  std::vector<nlohmann::json> values;
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  double sigma_e2 = 0.0;
  std::string algorithm = "alg1";
  SolveOptions options;
  std::vector<SweepAxis> sweep;
  std::vector<nlohmann::json> points;  // explicit combinations; exclusive with sweep
  std::vector<std::uint64_t> seeds;
  int threads = 0;  // 0: hardware concurrency

  /// Fully populated configuration, defaults included; the hash is taken over its dump.
  nlohmann::json to_json() const;
  void validate() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json load_json_file(const std::string& path);

/// 64-bit FNV-1a of the canonical configuration dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// One combination of sweep values applied to the base configuration.
struct SweepPoint {
  int index = 0;
  std::vector<std::pair<std::string, nlohmann::json>> values;  // in axis order
  ScenarioConfig scenario;
  Algorithm algorithm = Algorithm::alg1;
  SolveOptions options;

  std::string label() const;
};

std::vector<SweepPoint> expand_sweep(const ExperimentConfig& cfg);

struct RunRecord {
  int point = 0;
  std::uint64_t seed = 0;
  JbasResult result;
  std::string error;  // exception text when the run threw
};

struct ExperimentResult {
  std::vector<SweepPoint> points;
  std::vector<RunRecord> runs;  // point-major, seeds in configured order
  int infeasible = 0;
  int failures = 0;

  /// 0 success, 3 infeasible seeds, 4 solver failures (takes precedence).
  int exit_code() const;
};

/// Runs every (point, seed) pair on a worker pool; results are ordered
/// independently of scheduling. When dump_dir is non-empty the first
/// phase-1 program of each run is written there in triplet form.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& dump_dir = {});

struct AggregateRow {
  int point = 0;
  std::string label;
  std::string algorithm;
  int total = 0, used = 0;
  double mean_ee = 0.0, stderr_ee = 0.0;
  double mean_sum_rate = 0.0, stderr_sum_rate = 0.0;
  double mean_active = 0.0, stderr_active = 0.0;
  std::string note;
};

/// Means and standard errors per sweep point over runs with a usable result.
std::vector<AggregateRow> aggregate(const ExperimentResult& r);

void write_traces_csv(const ExperimentResult& r, std::ostream& os);
void write_results_csv(const ExperimentResult& r, std::ostream& os);
void write_summary_csv(const ExperimentResult& r, std::ostream& os);
/// Rows (curve, control, value, mean EE, mean SR, mean active) for PWEE
/// points carrying kappa and alg3 points carrying varrho, sorted by
/// control and value. Header only otherwise.
void write_tradeoff_csv(const ExperimentResult& r, std::ostream& os);
/// Copy of a CSV text without the columns whose header ends in "_ms".
std::string strip_timing_columns(const std::string& csv);
nlohmann::json manifest(const ExperimentConfig& cfg, const ExperimentResult& r);

/// Writes traces.csv, results.csv, summary.csv, tradeoff.csv and manifest.json into dir.
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& r, const std::string& dir);

}  // namespace jbas
