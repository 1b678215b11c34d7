// SPDX-License-Identifier: Apache-2.0
//
// Successive convex approximation drivers: feasible initialization, the
// relaxed selection loop (phase 1), Boolean rounding, and the fixed-antenna
// refit (phase 2).

#pragma once

#include <string>
#include <vector>

#include "jbas/bounds.hpp"
#include "jbas/model.hpp"
#include "jbas/subproblems.hpp"

namespace jbas {

struct SolveOptions {
  double chi = 2.0;
  double epsilon = 1e-3;
  int max_iter = 50;
  double rel_tol = 1e-4;
  RatePath backend_path = RatePath::socp;
  bool min_antennas = true;
  double kappa = 1.0;
  double varrho = 0.0;
  double rho = 0.0;
  double varsigma = 2.0;

  /// Conic solver tolerance inside the loops.
  double solver_tol = 1e-10;

  // Feasible initialization.
  double lambda = 10.0;
  double slack_tol = 1e-6;
  int init_max_iter = 100;
  /// Selects the random starting beamformers; runs differing only here are independent restarts.
  int start = 0;

  void validate() const;
};

enum class RunStatus {
  converged,
  iteration_limit,
  infeasible,      // no feasible initial point
  solver_failure,  // a subproblem failed; best point so far is returned
  fallback,        // phase 2 failed after rounding; phase-1 point is returned
};

const char* to_string(RunStatus s);

struct TraceRecord {
  int iter = 0;
  int phase = 1;
  double objective = 0.0;  // subproblem optimum
  double ee_bits_per_joule = 0.0;
  double sum_rate_bps = 0.0;
  double power_w = 0.0;
  double active_antennas = 0.0;
  double solve_ms = 0.0;
};

struct RunTrace {
  std::vector<TraceRecord> records;
  RunStatus status = RunStatus::converged;

  std::vector<double> objectives(int phase) const;
};

struct JbasResult {
  BeamformerSet w;
  SelectionState selection;
  double ee = 0.0;        // bits/J
  double sum_rate = 0.0;  // bits/s
  std::vector<double> group_rates;
  Eigen::VectorXd gamma, beta;  // final program values, noise units
  RunTrace trace;
  RunStatus status = RunStatus::converged;
  std::string note;

  /// True for the statuses whose point is a feasible transmission design.
  bool usable() const {
    return status == RunStatus::converged || status == RunStatus::iteration_limit || status == RunStatus::fallback;
  }
};

struct InitResult {
  bool feasible = false;
  ExpansionPoint point;
  int iterations = 0;
  double lambda = 0.0;
  std::vector<int> violated_groups;
  std::string message;
};

/// Penalized sum-rate iterations from random small beamformers until every
/// slack vanishes. A non-empty mask restricts the transmit antennas.
InitResult initialize_feasible(const Scenario& s, const SolveOptions& opts, const std::vector<bool>& mask = {});

JbasResult run_algorithm1(const Scenario& s, const SolveOptions& opts);
/// Phase 1 only; antennas below the threshold are dropped without a refit.
JbasResult run_algorithm1_simple(const Scenario& s, const SolveOptions& opts);
JbasResult run_algorithm2(const Scenario& s, SmoothingKind kind, const SolveOptions& opts);
JbasResult run_pwee(const Scenario& s, double kappa, const SolveOptions& opts);
JbasResult run_algorithm3(const Scenario& s, double varrho, const SolveOptions& opts);
JbasResult run_no_as_baseline(const Scenario& s, const SolveOptions& opts);
/// Beamforming-only optimization over a fixed antenna set.
JbasResult run_fixed_antennas(const Scenario& s, const std::vector<bool>& mask, const SolveOptions& opts);

enum class Algorithm { alg1, alg1_simple, alg2_f1, alg2_f2, alg2_f3, pwee, alg3, no_as };

const char* to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);
JbasResult run_algorithm(Algorithm a, const Scenario& s, const SolveOptions& opts);

/// Every feasible-output property of a result: per-antenna caps, group rate
/// targets and exact zeros on switched-off antennas. Empty means all hold.
std::vector<std::string> check_result_feasibility(const JbasResult& r, const Scenario& s, double power_tol = 1e-7,
                                                  double rate_rel_tol = 1e-6);

}  // namespace jbas
