// SPDX-License-Identifier: Apache-2.0

#include "jbas/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace jbas {

double PsiBound::operator()(const Eigen::VectorXcd& w, double beta) const {
  return 2.0 * c.dot(w).real() - d * beta;
}

PsiBound psi(const Eigen::VectorXcd& h, const Eigen::VectorXcd& w_n, double beta_n) {
  if (!(beta_n > 0.0)) throw std::domain_error("psi: expansion beta must be positive");
  const std::complex<double> hw = h.dot(w_n);  // h^H w_n
  PsiBound b;
  b.c = h * (hw / beta_n);
  b.d = std::norm(hw) / (beta_n * beta_n);
  return b;
}

UpsilonBound upsilon(double a_n, double chi) {
  if (chi < 1.0) throw std::domain_error("upsilon: chi must be at least 1");
  if (a_n < 0.0 || a_n > 1.0) throw std::domain_error("upsilon: a_n must lie in [0, 1]");
  UpsilonBound u;
  if (chi == 1.0) {
    u.slope = 1.0;
    return u;
  }
  u.constant = (1.0 - chi) * std::pow(a_n, chi);
  u.slope = chi * std::pow(a_n, chi - 1.0);
  return u;
}

XiBound xi(double gamma_n) {
  if (!(gamma_n > 0.0)) throw std::domain_error("xi: expansion gamma must be positive");
  XiBound x;
  x.nu1 = gamma_n * gamma_n / (1.0 + gamma_n);
  x.nu2 = std::log1p(gamma_n) + gamma_n / (1.0 + gamma_n);
  return x;
}

DeltaBound delta(double r_n, double x_n) {
  if (!(r_n > 0.0) || !(x_n > 0.0)) throw std::domain_error("delta: expansion point must be positive");
  const double q = r_n / x_n;
  return {2.0 * q, q * q};
}

const char* to_string(SmoothingKind kind) {
  switch (kind) {
    case SmoothingKind::f1: return "f1";
    case SmoothingKind::f2: return "f2";
    case SmoothingKind::f3: return "f3";
  }
  return "?";
}

SmoothingKind smoothing_kind_from_string(const std::string& name) {
  if (name == "f1") return SmoothingKind::f1;
  if (name == "f2") return SmoothingKind::f2;
  if (name == "f3") return SmoothingKind::f3;
  throw ConfigError("unknown smoothing function '" + name + "'");
}

double smoothing_term(double phi, SmoothingKind kind, double varsigma) {
  switch (kind) {
    case SmoothingKind::f1: return phi;
    case SmoothingKind::f2: return std::pow(phi, 1.0 / varsigma);
    case SmoothingKind::f3: return std::log2(1.0 + std::pow(phi, 1.0 / varsigma));
  }
  return 0.0;
}

Eigen::VectorXd normalized_antenna_norms(const BeamformerSet& w, const Scenario& s) {
  Eigen::VectorXd phi(s.total_antennas());
  const double scale = 1.0 / std::sqrt(s.power.p_max);
  for (int b = 0; b < s.num_bs; ++b)
    for (int i = 0; i < s.antennas[b]; ++i) phi[s.antenna_offset(b) + i] = w.antenna_row(s, b, i).norm() * scale;
  return phi;
}

double smoothing_value(const BeamformerSet& w, const Scenario& s, SmoothingKind kind, double varsigma) {
  if (varsigma < 1.0) throw std::domain_error("smoothing: varsigma must be at least 1");
  double total = 0.0;
  const Eigen::VectorXd phi = normalized_antenna_norms(w, s);
  for (int j = 0; j < phi.size(); ++j) total += smoothing_term(phi[j], kind, varsigma);
  return total;
}

SmoothingMajorant smoothing_majorant(const Eigen::VectorXd& phi_n, double p_max, SmoothingKind kind,
                                     double varsigma) {
  if (varsigma < 1.0) throw std::domain_error("smoothing: varsigma must be at least 1");
  const double inv_root = 1.0 / std::sqrt(p_max);
  SmoothingMajorant m;
  m.slope = Eigen::VectorXd::Constant(phi_n.size(), inv_root);
  if (kind == SmoothingKind::f1 || (kind == SmoothingKind::f2 && varsigma == 1.0)) return m;

  const double e = 1.0 / varsigma;
  for (int j = 0; j < phi_n.size(); ++j) {
    const double p = std::max(phi_n[j], kPhiMin);
    const double pe = std::pow(p, e);
    // derivative of the term with respect to phi
    double dphi = e * pe / p;
    if (kind == SmoothingKind::f3) dphi /= std::log(2.0) * (1.0 + pe);
    m.slope[j] = dphi * inv_root;
    m.constant += smoothing_term(p, kind, varsigma) - dphi * p;
  }
  return m;
}

SmoothingMajorant smoothing_majorant(const BeamformerSet& w_n, const Scenario& s, SmoothingKind kind,
                                     double varsigma) {
  return smoothing_majorant(normalized_antenna_norms(w_n, s), s.power.p_max, kind, varsigma);
}

}  // namespace jbas
