// SPDX-License-Identifier: Apache-2.0
//
// Builders for the convex programs solved at each iteration of the
// successive convex approximation drivers.
//
// All builders work with noise-normalized channels h / sqrt(N0), so beta and
// gamma are measured in units of the noise power. Rates are in nats per
// channel use and powers in watts.
//
// Lifted (Charnes-Cooper) programs carry the scale variable phi, the inverse
// of the total consumed power; every other variable is the original one
// multiplied by phi. Unlifted programs have phi fixed to one.
//
// Variable order is fixed: beamformers (group by group, antenna by antenna,
// real part then imaginary part), gamma, beta, v, a, group rates, phi, and
// then any builder-specific extras.

#pragma once

#include <vector>

#include "jbas/bounds.hpp"
#include "jbas/conic.hpp"
#include "jbas/model.hpp"

namespace jbas {

enum class RatePath {
  socp,     // log(1 + gamma) replaced by its inverse-affine lower bound
  generic,  // exact exponential-cone rows
};

const char* to_string(RatePath p);
RatePath rate_path_from_string(const std::string& name);

struct BuildOptions {
  double chi = 2.0;
  /// Weight of the adjustable power g(v, a) in the power budget.
  double kappa = 1.0;
  RatePath rate_path = RatePath::socp;
  /// Adds sum_i a_{b,i} >= X_b whenever selection is optimized.
  bool min_antennas = true;
  /// Empty: antenna selection is optimized. Otherwise a fixed antenna set;
  /// masked-off antennas get no beamformer variables at all.
  std::vector<bool> mask;
};

/// Variable indices of a built program; -1 marks an absent variable.
struct ProgramLayout {
  bool lifted = true;
  int phi = -1;
  std::vector<std::vector<int>> w;  // [group][antenna] index of the real part; imaginary part follows
  std::vector<int> gamma, beta;     // per user
  std::vector<int> v, a;            // per flat antenna
  std::vector<int> r;               // per group
  std::vector<int> t;               // per flat antenna norm epigraph (sparsity)
  int tx = -1;                      // transmit-power epigraph (sparsity)
  int sqrt_rate = -1;               // scalarization r
  int ee = -1;                      // scalarization x
  std::vector<int> q1, q2, p, mu;   // feasibility slacks
};

struct Subproblem {
  conic::ConicProgram program;
  ProgramLayout layout;
};

/// Solved program mapped back to the original variables (lifted ones divided by phi).
struct LiftedSolution {
  double phi = 1.0;
  double objective = 0.0;
  BeamformerSet w;
  Eigen::VectorXd gamma, beta;  // per user, noise units
  Eigen::VectorXd v, a;         // per flat antenna; zeros where absent
  Eigen::VectorXd r;            // per group, nats
  double sqrt_rate = 0.0;
  double ee = 0.0;
  Eigen::VectorXd q1, q2, p, mu;

  double max_slack() const;
};

LiftedSolution recover(const Subproblem& sp, const Scenario& s, const Eigen::VectorXd& x);

/// Lifted energy-efficiency program of the mixed-Boolean relaxation.
Subproblem build_cc_subproblem(const Scenario& s, const ExpansionPoint& ep, const BuildOptions& opts);
/// Same program with the rate rows forced to the second-order-cone path.
Subproblem build_socp_subproblem(const Scenario& s, const ExpansionPoint& ep, BuildOptions opts);

/// Lifted sparsity program; the antenna count is replaced by the smoothing
/// function (exact for f1, majorized at ep.w for f2 and f3). Honors opts.mask.
Subproblem build_sparsity_subproblem(const Scenario& s, const ExpansionPoint& ep, SmoothingKind kind, double rho,
                                     double varsigma, const BuildOptions& opts);

/// Unlifted scalarization program maximizing x + varrho * sum_g r_g / p_min.
Subproblem build_scalarization_subproblem(const Scenario& s, const ExpansionPoint& ep, double varrho, double p_min,
                                          const BuildOptions& opts);

/// Penalized sum-rate program with slacks on every nonconvex row.
Subproblem build_feasibility_subproblem(const Scenario& s, const ExpansionPoint& ep, double lambda,
                                        const BuildOptions& opts);

/// P_0 + P_RF * sum_b X_b.
double minimum_power(const Scenario& s);

/// Channel of user k from BS b divided by sqrt(N0).
Eigen::VectorXcd normalized_channel(const Scenario& s, int b, int k);

}  // namespace jbas
