// SPDX-License-Identifier: Apache-2.0

#include "jbas/subproblems.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace jbas {

using conic::ConeKind;
using conic::LinExpr;

namespace {

constexpr double kGammaFloor = 1e-9;

std::string idx(const char* name, int a) { return std::string(name) + "[" + std::to_string(a) + "]"; }
std::string idx(const char* name, int a, int b) {
  return std::string(name) + "[" + std::to_string(a) + "," + std::to_string(b) + "]";
}

// Shared variable and row construction. In unlifted mode phi() is the constant 1.
class Assembler {
 public:
  Assembler(const Scenario& s, const BuildOptions& opts, bool lifted) : s_(s), opts_(opts) {
    sp_.layout.lifted = lifted;
    const int total = s.total_antennas();
    active_.assign(total, true);
    if (!opts.mask.empty()) {
      if (static_cast<int>(opts.mask.size()) != total) throw ConfigError("antenna mask has the wrong length");
      active_ = opts.mask;
    }
    const double scale = 1.0 / std::sqrt(s.power.noise_linear());
    h_.assign(s.num_bs, {});
    for (int b = 0; b < s.num_bs; ++b)
      for (int k = 0; k < s.num_users(); ++k) h_[b].push_back(s.channels[b][k] * scale);
  }

  bool fixed_mask() const { return !opts_.mask.empty(); }
  bool active(int b, int i) const { return active_[s_.antenna_offset(b) + i]; }
  int active_count() const { return static_cast<int>(std::count(active_.begin(), active_.end(), true)); }
  conic::ConicProgram& program() { return sp_.program; }
  ProgramLayout& layout() { return sp_.layout; }

  LinExpr phi() const { return sp_.layout.lifted ? LinExpr::var(sp_.layout.phi) : LinExpr(1.0); }

  // Variables, in the documented order.
  void add_beamformers() {
    auto& L = sp_.layout;
    L.w.assign(s_.num_groups(), {});
    for (int g = 0; g < s_.num_groups(); ++g) {
      const int b = s_.groups[g].bs;
      L.w[g].assign(s_.antennas[b], -1);
      for (int i = 0; i < s_.antennas[b]; ++i) {
        if (!active(b, i)) continue;
        L.w[g][i] = program().add_var(idx("w", g, i) + ".re");
        program().add_var(idx("w", g, i) + ".im");
      }
    }
  }

  void add_user_vars() {
    auto& L = sp_.layout;
    for (int k = 0; k < s_.num_users(); ++k) L.gamma.push_back(program().add_var(idx("gamma", k)));
    for (int k = 0; k < s_.num_users(); ++k) L.beta.push_back(program().add_var(idx("beta", k)));
  }

  void add_antenna_vars(bool with_v, bool with_a) {
    auto& L = sp_.layout;
    const int total = s_.total_antennas();
    L.v.assign(total, -1);
    L.a.assign(total, -1);
    if (with_v)
      for (int j = 0; j < total; ++j)
        if (active_[j]) L.v[j] = program().add_var(idx("v", j));
    if (with_a)
      for (int j = 0; j < total; ++j)
        if (active_[j]) L.a[j] = program().add_var(idx("a", j));
  }

  void add_group_rates() {
    for (int g = 0; g < s_.num_groups(); ++g) sp_.layout.r.push_back(program().add_var(idx("r", g)));
  }

  void add_phi() {
    if (sp_.layout.lifted) sp_.layout.phi = program().add_var("phi");
  }

  // Real and imaginary parts of every coefficient of antenna i at BS b.
  std::vector<LinExpr> antenna_row(int b, int i) const {
    std::vector<LinExpr> row;
    for (int g : s_.groups_of_bs(b)) {
      const int base = sp_.layout.w[g][i];
      if (base < 0) continue;
      row.push_back(LinExpr::var(base));
      row.push_back(LinExpr::var(base + 1));
    }
    return row;
  }

  // h^H w_g for user k, split into real and imaginary parts.
  std::pair<LinExpr, LinExpr> inner(int k, int g) const {
    const int b = s_.groups[g].bs;
    const Eigen::VectorXcd& h = h_[b][k];
    LinExpr re, im;
    for (int i = 0; i < h.size(); ++i) {
      const int base = sp_.layout.w[g][i];
      if (base < 0) continue;
      re.add(base, h[i].real()).add(base + 1, h[i].imag());
      im.add(base, -h[i].imag()).add(base + 1, h[i].real());
    }
    return {re, im};
  }

  std::vector<LinExpr> all_beamformer_entries() const {
    std::vector<LinExpr> out;
    for (const auto& row : sp_.layout.w)
      for (int base : row) {
        if (base < 0) continue;
        out.push_back(LinExpr::var(base));
        out.push_back(LinExpr::var(base + 1));
      }
    return out;
  }

  // gamma_k <= Psi_k(w_g, beta_k) (+ slack).
  void add_psi_rows(const ExpansionPoint& ep, const std::vector<int>* slack = nullptr) {
    const auto& L = sp_.layout;
    for (int g = 0; g < s_.num_groups(); ++g) {
      const int b = s_.groups[g].bs;
      for (int k : s_.groups[g].users) {
        const PsiBound bound = psi(h_[b][k], ep.w.w[g], ep.beta[k]);
        LinExpr e;
        for (int i = 0; i < bound.c.size(); ++i) {
          const int base = L.w[g][i];
          if (base < 0) continue;
          e.add(base, 2.0 * bound.c[i].real()).add(base + 1, 2.0 * bound.c[i].imag());
        }
        e.add(L.beta[k], -bound.d);
        e.add(L.gamma[k], -1.0);
        if (slack) e.add((*slack)[k], 1.0);
        program().add_nonneg(e, idx("psi", k));
      }
    }
  }

  // phi^2 + sum_{u != g} |h^H w_u|^2 <= phi * (beta_k + slack).
  void add_interference_rows(const std::vector<int>* slack = nullptr) {
    const auto& L = sp_.layout;
    for (int g = 0; g < s_.num_groups(); ++g) {
      for (int k : s_.groups[g].users) {
        std::vector<LinExpr> y1{phi()};
        for (int u = 0; u < s_.num_groups(); ++u) {
          if (u == g) continue;
          auto [re, im] = inner(k, u);
          y1.push_back(std::move(re));
          y1.push_back(std::move(im));
        }
        LinExpr y3 = LinExpr::var(L.beta[k]);
        if (slack) y3.add((*slack)[k], 1.0);
        program().add_rotated(phi(), y3, y1, idx("interference", k));
      }
    }
  }

  // r_g <= phi log(1 + gamma_k / phi), exactly or through the Xi bound.
  void add_rate_rows(const ExpansionPoint& ep) {
    const auto& L = sp_.layout;
    for (int g = 0; g < s_.num_groups(); ++g) {
      for (int k : s_.groups[g].users) {
        const LinExpr r = LinExpr::var(L.r[g]);
        const LinExpr gam = LinExpr::var(L.gamma[k]);
        if (opts_.rate_path == RatePath::generic) {
          program().add(ConeKind::exponential, {r, phi(), phi() + gam}, idx("rate", g, k));
        } else if (ep.gamma[k] < kGammaFloor) {
          // the bound degenerates to r <= 0 as the expansion SINR vanishes
          program().add_nonneg(-r, idx("rate", g, k));
        } else {
          const XiBound bound = xi(ep.gamma[k]);
          program().add_rotated(gam, bound.nu2 * phi() - r, {std::sqrt(bound.nu1) * phi()}, idx("rate", g, k));
        }
      }
    }
  }

  void add_min_rate_rows() {
    for (int g = 0; g < s_.num_groups(); ++g)
      program().add_nonneg(LinExpr::var(sp_.layout.r[g]) - s_.group_target_nats(g) * phi(), idx("min_rate", g));
  }

  // ||w_hat||^2 <= v (phi x_n + a z_n), or <= v phi for a fixed antenna set, plus v <= phi P_max.
  void add_antenna_power_rows(const ExpansionPoint& ep) {
    const auto& L = sp_.layout;
    for (int b = 0; b < s_.num_bs; ++b) {
      for (int i = 0; i < s_.antennas[b]; ++i) {
        const int j = s_.antenna_offset(b) + i;
        if (!active_[j]) continue;
        LinExpr y3 = phi();
        if (L.a[j] >= 0) {
          const UpsilonBound u = upsilon(std::clamp(ep.a[j], 0.0, 1.0), opts_.chi);
          y3 = u.constant * phi() + LinExpr::var(L.a[j], u.slope);
        }
        program().add_rotated(LinExpr::var(L.v[j]), y3, antenna_row(b, i), idx("antenna_power", j));
        program().add_nonneg(s_.power.p_max * phi() - LinExpr::var(L.v[j]), idx("v_max", j));
        if (L.a[j] >= 0) {
          program().add_nonneg(LinExpr::var(L.a[j]), idx("a_min", j));
          program().add_nonneg(phi() - LinExpr::var(L.a[j]), idx("a_max", j));
        }
      }
    }
  }

  // g(v, a) = (1/eta) sum v + P_RF (sum a | phi * active count).
  LinExpr adjustable_power() const {
    const auto& L = sp_.layout;
    LinExpr e;
    for (int j = 0; j < s_.total_antennas(); ++j) {
      if (L.v[j] >= 0) e.add(L.v[j], 1.0 / s_.power.eta);
      if (L.a[j] >= 0) e.add(L.a[j], s_.power.p_rf);
    }
    if (fixed_mask()) e += s_.power.p_rf * active_count() * phi();
    return e;
  }

  void add_min_antenna_rows() {
    if (!opts_.min_antennas || fixed_mask()) return;
    const auto x = min_active_antennas(s_);
    for (int b = 0; b < s_.num_bs; ++b) {
      if (x[b] == 0) continue;
      LinExpr e = -static_cast<double>(x[b]) * phi();
      for (int i = 0; i < s_.antennas[b]; ++i) {
        const int j = s_.antenna_offset(b) + i;
        if (sp_.layout.a[j] >= 0) e.add(sp_.layout.a[j], 1.0);
      }
      program().add_nonneg(e, idx("min_active", b));
    }
  }

  void maximize_rate_sum(double weight = 1.0) {
    for (int rg : sp_.layout.r) program().objective[rg] += weight;
  }

  Subproblem take() { return std::move(sp_); }

  const Scenario& scenario() const { return s_; }

 private:
  const Scenario& s_;
  const BuildOptions& opts_;
  std::vector<bool> active_;
  std::vector<std::vector<Eigen::VectorXcd>> h_;
  Subproblem sp_;
};

void check_expansion(const Scenario& s, const ExpansionPoint& ep) {
  if (static_cast<int>(ep.w.w.size()) != s.num_groups() || ep.beta.size() != s.num_users() ||
      ep.gamma.size() != s.num_users() || ep.a.size() != s.total_antennas())
    throw ConfigError("expansion point does not match the scenario");
}

}  // namespace

const char* to_string(RatePath p) { return p == RatePath::socp ? "socp" : "generic"; }

RatePath rate_path_from_string(const std::string& name) {
  if (name == "socp") return RatePath::socp;
  if (name == "generic") return RatePath::generic;
  throw ConfigError("backend path must be 'socp' or 'generic'");
}

Eigen::VectorXcd normalized_channel(const Scenario& s, int b, int k) {
  return s.channels[b][k] / std::sqrt(s.power.noise_linear());
}

double minimum_power(const Scenario& s) {
  const auto x = min_active_antennas(s);
  double count = 0.0;
  for (int v : x) count += v;
  return s.p0() + s.power.p_rf * count;
}

Subproblem build_cc_subproblem(const Scenario& s, const ExpansionPoint& ep, const BuildOptions& opts) {
  check_expansion(s, ep);
  Assembler as(s, opts, true);
  as.add_beamformers();
  as.add_user_vars();
  as.add_antenna_vars(true, !as.fixed_mask());
  as.add_group_rates();
  as.add_phi();

  as.program().add_nonneg(LinExpr(1.0) - opts.kappa * as.adjustable_power() - s.p0() * as.phi(), "budget");
  as.add_antenna_power_rows(ep);
  as.add_psi_rows(ep);
  as.add_min_rate_rows();
  as.add_interference_rows();
  as.add_rate_rows(ep);
  as.add_min_antenna_rows();
  as.maximize_rate_sum();
  return as.take();
}

Subproblem build_socp_subproblem(const Scenario& s, const ExpansionPoint& ep, BuildOptions opts) {
  opts.rate_path = RatePath::socp;
  return build_cc_subproblem(s, ep, opts);
}

Subproblem build_sparsity_subproblem(const Scenario& s, const ExpansionPoint& ep, SmoothingKind kind, double rho,
                                     double varsigma, const BuildOptions& opts) {
  check_expansion(s, ep);
  if (rho < 0.0) throw ConfigError("rho must be nonnegative");
  Assembler as(s, opts, true);
  as.add_beamformers();
  as.add_user_vars();
  as.add_antenna_vars(false, false);
  as.add_group_rates();
  as.add_phi();
  auto& L = as.layout();

  const int total = s.total_antennas();
  L.t.assign(total, -1);
  std::vector<int> active_idx;
  for (int b = 0; b < s.num_bs; ++b)
    for (int i = 0; i < s.antennas[b]; ++i)
      if (as.active(b, i)) {
        const int j = s.antenna_offset(b) + i;
        L.t[j] = as.program().add_var(idx("t", j));
        active_idx.push_back(j);
      }
  L.tx = as.program().add_var("tx");

  const Eigen::VectorXd phi_all = normalized_antenna_norms(ep.w, s);
  Eigen::VectorXd phi_n(static_cast<int>(active_idx.size()));
  for (std::size_t n = 0; n < active_idx.size(); ++n) phi_n[static_cast<int>(n)] = phi_all[active_idx[n]];
  const SmoothingMajorant f = smoothing_majorant(phi_n, s.power.p_max, kind, varsigma);

  LinExpr count = f.constant * as.phi();
  for (std::size_t n = 0; n < active_idx.size(); ++n) count.add(L.t[active_idx[n]], f.slope[static_cast<int>(n)]);
  as.program().add_nonneg(LinExpr(1.0) - (1.0 / s.power.eta) * LinExpr::var(L.tx) -
                              (s.power.p_rf + rho) * count - s.p0() * as.phi(),
                          "budget");
  as.program().add_rotated(LinExpr::var(L.tx), as.phi(), as.all_beamformer_entries(), "transmit_power");
  for (int b = 0; b < s.num_bs; ++b)
    for (int i = 0; i < s.antennas[b]; ++i) {
      if (!as.active(b, i)) continue;
      const int j = s.antenna_offset(b) + i;
      const auto row = as.antenna_row(b, i);
      as.program().add_soc(std::sqrt(s.power.p_max) * as.phi(), row, idx("antenna_power", j));
      as.program().add_soc(LinExpr::var(L.t[j]), row, idx("antenna_norm", j));
    }
  as.add_psi_rows(ep);
  as.add_min_rate_rows();
  as.add_interference_rows();
  as.add_rate_rows(ep);
  as.maximize_rate_sum();
  return as.take();
}

Subproblem build_scalarization_subproblem(const Scenario& s, const ExpansionPoint& ep, double varrho, double p_min,
                                          const BuildOptions& opts) {
  check_expansion(s, ep);
  if (varrho < 0.0) throw ConfigError("varrho must be nonnegative");
  if (!(p_min > 0.0)) throw ConfigError("minimum power must be positive");
  Assembler as(s, opts, false);
  as.add_beamformers();
  as.add_user_vars();
  as.add_antenna_vars(true, !as.fixed_mask());
  as.add_group_rates();
  auto& L = as.layout();
  L.sqrt_rate = as.program().add_var("sqrt_rate");
  L.ee = as.program().add_var("ee");

  const DeltaBound d = delta(ep.r, ep.x);
  as.program().add_nonneg(LinExpr::var(L.sqrt_rate, d.cr) - LinExpr::var(L.ee, d.cx) - as.adjustable_power() -
                              LinExpr(s.p0()),
                          "budget");
  LinExpr rate_sum;
  for (int rg : L.r) rate_sum.add(rg, 1.0);
  as.program().add_rotated(rate_sum, LinExpr(1.0), {LinExpr::var(L.sqrt_rate)}, "sqrt_rate");
  as.add_antenna_power_rows(ep);
  as.add_psi_rows(ep);
  as.add_min_rate_rows();
  as.add_interference_rows();
  as.add_rate_rows(ep);
  as.add_min_antenna_rows();
  as.program().objective[L.ee] = 1.0;
  as.maximize_rate_sum(varrho / p_min);
  return as.take();
}

Subproblem build_feasibility_subproblem(const Scenario& s, const ExpansionPoint& ep, double lambda,
                                        const BuildOptions& opts) {
  check_expansion(s, ep);
  if (!(lambda > 0.0)) throw ConfigError("penalty weight must be positive");
  Assembler as(s, opts, false);
  as.add_beamformers();
  as.add_user_vars();
  as.add_antenna_vars(false, false);
  as.add_group_rates();
  auto& L = as.layout();
  auto& p = as.program();
  const int K = s.num_users();
  for (int k = 0; k < K; ++k) L.q1.push_back(p.add_var(idx("q1", k)));
  for (int k = 0; k < K; ++k) L.q2.push_back(p.add_var(idx("q2", k)));
  L.p.assign(s.total_antennas(), -1);
  for (int b = 0; b < s.num_bs; ++b)
    for (int i = 0; i < s.antennas[b]; ++i)
      if (as.active(b, i)) L.p[s.antenna_offset(b) + i] = p.add_var(idx("p", s.antenna_offset(b) + i));
  for (int g = 0; g < s.num_groups(); ++g) L.mu.push_back(p.add_var(idx("mu", g)));

  for (int b = 0; b < s.num_bs; ++b)
    for (int i = 0; i < s.antennas[b]; ++i) {
      const int j = s.antenna_offset(b) + i;
      if (L.p[j] < 0) continue;
      p.add_rotated(LinExpr::var(L.p[j]) + LinExpr(s.power.p_max), LinExpr(1.0), as.antenna_row(b, i),
                    idx("antenna_power", j));
    }
  as.add_psi_rows(ep, &L.q1);
  for (int g = 0; g < s.num_groups(); ++g)
    p.add_nonneg(LinExpr::var(L.r[g]) + LinExpr::var(L.mu[g]) - LinExpr(s.group_target_nats(g)), idx("min_rate", g));
  as.add_rate_rows(ep);
  as.add_interference_rows(&L.q2);

  auto penalize = [&](const std::vector<int>& vars, const char* name) {
    for (int v : vars) {
      if (v < 0) continue;
      p.add_nonneg(LinExpr::var(v), name);
      p.objective[v] = -lambda;
    }
  };
  penalize(L.q1, "q1");
  penalize(L.q2, "q2");
  penalize(L.p, "p");
  penalize(L.mu, "mu");
  as.maximize_rate_sum();
  return as.take();
}

double LiftedSolution::max_slack() const {
  double m = 0.0;
  for (const Eigen::VectorXd* v : {&q1, &q2, &p, &mu})
    if (v->size() > 0) m = std::max(m, v->maxCoeff());
  return m;
}

LiftedSolution recover(const Subproblem& sp, const Scenario& s, const Eigen::VectorXd& x) {
  const auto& L = sp.layout;
  LiftedSolution out;
  out.phi = L.lifted ? x[L.phi] : 1.0;
  out.objective = sp.program.objective_value(x);
  const double inv = 1.0 / out.phi;
  auto get = [&](int i) { return i >= 0 ? x[i] * inv : 0.0; };
  auto gather = [&](const std::vector<int>& ids) {
    Eigen::VectorXd v(static_cast<int>(ids.size()));
    for (std::size_t n = 0; n < ids.size(); ++n) v[static_cast<int>(n)] = get(ids[n]);
    return v;
  };

  out.w = BeamformerSet::zeros(s);
  for (int g = 0; g < s.num_groups(); ++g)
    for (std::size_t i = 0; i < L.w[g].size(); ++i) {
      const int base = L.w[g][i];
      if (base >= 0) out.w.w[g][static_cast<int>(i)] = {x[base] * inv, x[base + 1] * inv};
    }
  out.gamma = gather(L.gamma);
  out.beta = gather(L.beta);
  out.v = L.v.empty() ? Eigen::VectorXd::Zero(s.total_antennas()) : gather(L.v);
  // Without selection variables, a is the indicator of the antennas that carry beamformer entries.
  out.a = Eigen::VectorXd::Zero(s.total_antennas());
  for (int b = 0; b < s.num_bs; ++b)
    for (int i = 0; i < s.antennas[b]; ++i) {
      const int j = s.antenna_offset(b) + i;
      if (!L.a.empty() && L.a[j] >= 0) {
        out.a[j] = get(L.a[j]);
        continue;
      }
      for (int g : s.groups_of_bs(b))
        if (L.w[g][i] >= 0) out.a[j] = 1.0;
    }
  out.r = gather(L.r);
  out.sqrt_rate = L.sqrt_rate >= 0 ? x[L.sqrt_rate] : 0.0;
  out.ee = L.ee >= 0 ? x[L.ee] : 0.0;
  // slacks are never lifted
  auto raw = [&](const std::vector<int>& ids) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<int>(ids.size()));
    for (std::size_t n = 0; n < ids.size(); ++n)
      if (ids[n] >= 0) v[static_cast<int>(n)] = x[ids[n]];
    return v;
  };
  out.q1 = raw(L.q1);
  out.q2 = raw(L.q2);
  out.p = raw(L.p);
  out.mu = raw(L.mu);
  return out;
}

}  // namespace jbas
