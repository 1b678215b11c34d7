// SPDX-License-Identifier: Apache-2.0
//
// Tight one-sided surrogates used by the successive convex approximation
// loops. Each bound is returned as a coefficient record so program builders
// can embed it directly as an affine (or affine-over-inverse) row.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "jbas/model.hpp"

namespace jbas {

/// Point around which the surrogates are expanded. Channels are expected in
/// noise-normalized form wherever beta is interpreted as interference-plus-noise.
struct ExpansionPoint {
  BeamformerSet w;
  Eigen::VectorXd beta;   // per user
  Eigen::VectorXd gamma;  // per user
  Eigen::VectorXd a;      // per flat antenna index
  double r = 0.0;         // square root of the sum rate (scalarization only)
  double x = 0.0;         // energy efficiency (scalarization only)
};

/// Linear lower bound of |h^H w|^2 / beta:  2 Re(c^H w) - d * beta.
struct PsiBound {
  Eigen::VectorXcd c;  // h h^H w_n / beta_n
  double d = 0.0;      // (|h^H w_n| / beta_n)^2

  double operator()(const Eigen::VectorXcd& w, double beta) const;
};

PsiBound psi(const Eigen::VectorXcd& h, const Eigen::VectorXcd& w_n, double beta_n);

/// Affine lower bound of a^chi on [0, 1]:  constant + slope * a.
struct UpsilonBound {
  double constant = 0.0;  // (1 - chi) a_n^chi
  double slope = 0.0;     // chi a_n^(chi - 1)

  double operator()(double a) const { return constant + slope * a; }
};

UpsilonBound upsilon(double a_n, double chi);

/// Lower bound of log(1 + gamma):  nu2 - nu1 / gamma.
struct XiBound {
  double nu1 = 0.0;
  double nu2 = 0.0;

  double operator()(double gamma) const { return nu2 - nu1 / gamma; }
};

XiBound xi(double gamma_n);

/// Linear lower bound of r^2 / x:  cr * r - cx * x.
struct DeltaBound {
  double cr = 0.0;  // 2 r_n / x_n
  double cx = 0.0;  // (r_n / x_n)^2

  double operator()(double r, double x) const { return cr * r - cx * x; }
};

DeltaBound delta(double r_n, double x_n);

enum class SmoothingKind { f1, f2, f3 };

const char* to_string(SmoothingKind kind);
SmoothingKind smoothing_kind_from_string(const std::string& name);

/// Smallest normalized antenna norm used when expanding f2/f3.
inline constexpr double kPhiMin = 1e-6;

/// Contribution of one antenna with normalized norm phi = ||w_hat|| / sqrt(p_max).
double smoothing_term(double phi, SmoothingKind kind, double varsigma);
/// Per-antenna normalized norms, flat antenna order.
Eigen::VectorXd normalized_antenna_norms(const BeamformerSet& w, const Scenario& s);
double smoothing_value(const BeamformerSet& w, const Scenario& s, SmoothingKind kind, double varsigma);

/// Affine upper bound of the smoothing function in the per-antenna norms t:
///   f_hat(t) = constant + sum_j slope[j] * t[j].
struct SmoothingMajorant {
  Eigen::VectorXd slope;
  double constant = 0.0;

  double operator()(const Eigen::VectorXd& norms) const { return constant + slope.dot(norms); }
};

/// For f1 the result is exact (slope 1/sqrt(p_max), no constant). f2 with
/// varsigma = 1 returns the f1 record.
SmoothingMajorant smoothing_majorant(const BeamformerSet& w_n, const Scenario& s, SmoothingKind kind,
                                     double varsigma);
/// Same expansion from precomputed normalized norms.
SmoothingMajorant smoothing_majorant(const Eigen::VectorXd& phi_n, double p_max, SmoothingKind kind,
                                     double varsigma);

}  // namespace jbas
