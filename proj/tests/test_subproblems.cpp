// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "jbas/subproblems.hpp"

using namespace jbas;

namespace {

Scenario small(int n = 4, double rate = 5e4, std::uint64_t seed = 3) {
  ScenarioConfig c;
  c.antennas_per_bs = n;
  c.rate_target_bps = rate;
  return generate_scenario(c, seed);
}

// Beamformers with exactly 0.05 W per antenna, random phases.
BeamformerSet beams(const Scenario& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  BeamformerSet w = BeamformerSet::zeros(s);
  for (auto& v : w.w)
    for (int i = 0; i < v.size(); ++i) v[i] = {nd(rng), nd(rng)};
  for (int b = 0; b < s.num_bs; ++b)
    for (int i = 0; i < s.antennas[b]; ++i) {
      const double scale = std::sqrt(0.05 / w.antenna_power(s, b, i));
      for (int g : s.groups_of_bs(b)) w.w[g][i] *= scale;
    }
  return w;
}

ExpansionPoint point_at(const Scenario& s, const BeamformerSet& w, double a, bool meets_targets = true) {
  const auto rates = group_rates_nats(w, s);
  for (int g = 0; g < s.num_groups(); ++g) REQUIRE((!meets_targets || rates[g] >= s.group_target_nats(g)));
  ExpansionPoint ep;
  ep.w = w;
  ep.a = Eigen::VectorXd::Constant(s.total_antennas(), a);
  ep.beta.resize(s.num_users());
  ep.gamma.resize(s.num_users());
  for (int k = 0; k < s.num_users(); ++k) {
    ep.beta[k] = interference_plus_noise(w, s, k) / s.power.noise_linear();
    ep.gamma[k] = sinr(w, s, k);
  }
  return ep;
}

// The expansion point written in the program's own (lifted) variables.
Eigen::VectorXd lift(const Subproblem& sp, const Scenario& s, const ExpansionPoint& ep, double chi, double kappa) {
  const auto& L = sp.layout;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sp.program.num_vars);
  const auto rates = group_rates_nats(ep.w, s);
  double adjustable = 0.0;
  for (int b = 0; b < s.num_bs; ++b)
    for (int i = 0; i < s.antennas[b]; ++i) {
      const int j = s.antenna_offset(b) + i;
      const double a = L.a.empty() || L.a[j] < 0 ? 1.0 : ep.a[j];
      adjustable += ep.w.antenna_power(s, b, i) / std::pow(a, chi) / s.power.eta + s.power.p_rf * a;
    }
  const double phi = L.lifted ? 1.0 / (kappa * adjustable + s.p0()) : 1.0;
  if (L.lifted) x[L.phi] = phi;
  for (int g = 0; g < s.num_groups(); ++g) {
    for (std::size_t i = 0; i < L.w[g].size(); ++i) {
      if (L.w[g][i] < 0) continue;
      x[L.w[g][i]] = phi * ep.w.w[g][static_cast<int>(i)].real();
      x[L.w[g][i] + 1] = phi * ep.w.w[g][static_cast<int>(i)].imag();
    }
    x[L.r[g]] = phi * rates[g];
  }
  for (int k = 0; k < s.num_users(); ++k) {
    x[L.gamma[k]] = phi * ep.gamma[k];
    x[L.beta[k]] = phi * ep.beta[k];
  }
  for (int b = 0; b < s.num_bs; ++b)
    for (int i = 0; i < s.antennas[b]; ++i) {
      const int j = s.antenna_offset(b) + i;
      const double a = L.a.empty() || L.a[j] < 0 ? 1.0 : ep.a[j];
      if (!L.v.empty() && L.v[j] >= 0) x[L.v[j]] = phi * ep.w.antenna_power(s, b, i) / std::pow(a, chi);
      if (!L.a.empty() && L.a[j] >= 0) x[L.a[j]] = phi * a;
    }
  return x;
}

std::string dump(const Subproblem& sp) {
  std::ostringstream os;
  conic::dump_triplets(sp.program, os);
  return os.str();
}

conic::SolverSettings tight() {
  conic::SolverSettings st;
  st.tol_feas = st.tol_gap = 1e-10;
  return st;
}

}  // namespace

TEST_CASE("variable count of the lifted program on the default instance") {
  const Scenario s = small(16);
  const BeamformerSet w = beams(s, 1);
  const Subproblem sp = build_cc_subproblem(s, point_at(s, w, 1.0), {});
  // 2*16*4 beamformer reals + 2*32 (v, a) + 2*8 (gamma, beta) + 4 rates + phi
  CHECK(sp.program.num_vars == 213);
  CHECK(conic::validate(sp.program).empty());
  CHECK(sp.program.count(conic::ConeKind::exponential) == 0);
}

TEST_CASE("generic path uses exponential rows and the SOCP path none") {
  const Scenario s = small();
  const ExpansionPoint ep = point_at(s, beams(s, 2), 1.0);
  BuildOptions o;
  o.rate_path = RatePath::generic;
  const Subproblem g = build_cc_subproblem(s, ep, o);
  CHECK(g.program.count(conic::ConeKind::exponential) == s.num_users());
  const Subproblem p = build_socp_subproblem(s, ep, o);
  CHECK(p.program.count(conic::ConeKind::exponential) == 0);
  CHECK(conic::validate(g.program).empty());
  CHECK_THROWS_AS(rate_path_from_string("cvx"), ConfigError);
}

TEST_CASE("minimum power with every group carrying a target") {
  CHECK(minimum_power(small()) == doctest::Approx(11.4));
  CHECK(minimum_power(small(4, 0.0)) == doctest::Approx(9.8));
}

TEST_CASE("expansion point is feasible for the program built around it") {
  const Scenario s = small(4, 5e4);
  for (double a : {1.0, 0.7}) {
    const ExpansionPoint ep = point_at(s, beams(s, 4), a);
    for (RatePath path : {RatePath::socp, RatePath::generic}) {
      BuildOptions o;
      o.rate_path = path;
      const Subproblem sp = build_cc_subproblem(s, ep, o);
      const Eigen::VectorXd x = lift(sp, s, ep, o.chi, o.kappa);
      CHECK(conic::max_violation(sp.program, x) < 1e-9);
    }
  }
}

TEST_CASE("kappa weights only the adjustable power") {
  const Scenario s = small();
  const ExpansionPoint ep = point_at(s, beams(s, 5), 1.0);
  BuildOptions o;
  o.kappa = 0.3;
  const Subproblem sp = build_cc_subproblem(s, ep, o);
  CHECK(conic::max_violation(sp.program, lift(sp, s, ep, o.chi, 0.3)) < 1e-9);
  BuildOptions one;
  CHECK(dump(build_cc_subproblem(s, ep, one)) == dump(build_cc_subproblem(s, ep, BuildOptions{})));
}

TEST_CASE("solved lifted program recovers a point meeting the original constraints") {
  const Scenario s = small(4, 5e4);
  const ExpansionPoint ep = point_at(s, beams(s, 6), 1.0);
  const Subproblem sp = build_cc_subproblem(s, ep, {});
  const auto sol = conic::solve(sp.program, tight());
  REQUIRE(sol.ok());
  const LiftedSolution L = recover(sp, s, sol.x);
  CHECK(L.phi > 0.0);
  for (int b = 0; b < s.num_bs; ++b)
    for (int i = 0; i < s.antennas[b]; ++i) CHECK(L.w.antenna_power(s, b, i) <= s.power.p_max * (1 + 1e-7));
  const auto rates = group_rates_nats(L.w, s);
  for (int g = 0; g < s.num_groups(); ++g) {
    CHECK(rates[g] >= s.group_target_nats(g) * (1 - 1e-6));
    CHECK(rates[g] >= L.r[g] - 1e-7);
  }
  for (int k = 0; k < s.num_users(); ++k) {
    CHECK(sinr(L.w, s, k) >= L.gamma[k] * (1 - 1e-6));
    CHECK(interference_plus_noise(L.w, s, k) / s.power.noise_linear() <= L.beta[k] * (1 + 1e-6));
  }
  // the program value bounds the rate per unit of modeled power from below
  double modeled = s.p0();
  for (int j = 0; j < s.total_antennas(); ++j) modeled += L.v[j] / s.power.eta + s.power.p_rf * L.a[j];
  double rate_sum = 0.0;
  for (double r : rates) rate_sum += r;
  CHECK(rate_sum / modeled >= sol.objective * (1 - 1e-6));
  CHECK(sol.objective >= conic::ConicProgram(sp.program).objective_value(lift(sp, s, ep, 2.0, 1.0)) - 1e-9);
}

TEST_CASE("fixed mask drops every variable of switched-off antennas") {
  const Scenario s = small();
  BuildOptions o;
  o.mask.assign(s.total_antennas(), true);
  o.mask[1] = o.mask[6] = false;
  const Subproblem sp = build_cc_subproblem(s, point_at(s, beams(s, 7), 1.0), o);
  for (int g = 0; g < s.num_groups(); ++g) {
    const int b = s.groups[g].bs;
    for (int i = 0; i < s.antennas[b]; ++i) CHECK((sp.layout.w[g][i] < 0) == !o.mask[s.antenna_offset(b) + i]);
  }
  for (int a : sp.layout.a) CHECK(a == -1);
  const auto sol = conic::solve(sp.program, tight());
  REQUIRE(sol.ok());
  const LiftedSolution L = recover(sp, s, sol.x);
  for (int g : s.groups_of_bs(0)) CHECK(L.w.w[g][1] == std::complex<double>(0.0, 0.0));
  CHECK(L.a[1] == 0.0);
  CHECK(L.a[0] == 1.0);
  o.mask.pop_back();
  CHECK_THROWS_AS(build_cc_subproblem(s, point_at(s, beams(s, 7), 1.0), o), ConfigError);
}

TEST_CASE("sparsity program: f2 with varsigma 1 is the f1 program") {
  const Scenario s = small();
  const ExpansionPoint ep = point_at(s, beams(s, 8), 1.0);
  const Subproblem a = build_sparsity_subproblem(s, ep, SmoothingKind::f1, 0.2, 2.0, {});
  const Subproblem b = build_sparsity_subproblem(s, ep, SmoothingKind::f2, 0.2, 1.0, {});
  CHECK(dump(a) == dump(b));
  CHECK(conic::validate(a.program).empty());
  CHECK_THROWS_AS(build_sparsity_subproblem(s, ep, SmoothingKind::f1, -1.0, 2.0, {}), ConfigError);
}

TEST_CASE("sparsity program keeps the expansion point feasible and solves") {
  const Scenario s = small(4, 5e4);
  const BeamformerSet w = beams(s, 9);
  const ExpansionPoint ep = point_at(s, w, 1.0);
  const Subproblem sp = build_sparsity_subproblem(s, ep, SmoothingKind::f3, 0.0, 2.0, {});
  const auto sol = conic::solve(sp.program, tight());
  REQUIRE(sol.ok());
  const LiftedSolution L = recover(sp, s, sol.x);
  for (int b = 0; b < s.num_bs; ++b)
    for (int i = 0; i < s.antennas[b]; ++i) CHECK(L.w.antenna_power(s, b, i) <= s.power.p_max * (1 + 1e-7));
  // the smoothed count never undercounts the f3 value at the recovered point
  const SmoothingMajorant m = smoothing_majorant(ep.w, s, SmoothingKind::f3, 2.0);
  Eigen::VectorXd norms(s.total_antennas());
  for (int b = 0; b < s.num_bs; ++b)
    for (int i = 0; i < s.antennas[b]; ++i) norms[s.antenna_offset(b) + i] = std::sqrt(L.w.antenna_power(s, b, i));
  CHECK(m(norms) >= smoothing_value(L.w, s, SmoothingKind::f3, 2.0) - 1e-9);
}

TEST_CASE("scalarization program") {
  const Scenario s = small(4, 5e4);
  const BeamformerSet w = beams(s, 10);
  ExpansionPoint ep = point_at(s, w, 1.0);
  const auto rates = group_rates_nats(w, s);
  double total = 0.0;
  for (double r : rates) total += r;
  double tx = 0.0;
  for (const auto& wg : w.w) tx += wg.squaredNorm();
  const double power = tx / s.power.eta + s.power.p_rf * s.total_antennas() + s.p0();
  ep.r = std::sqrt(total);
  ep.x = total / power;

  const Subproblem sp = build_scalarization_subproblem(s, ep, 0.0, minimum_power(s), {});
  CHECK_FALSE(sp.layout.lifted);
  CHECK(sp.layout.phi == -1);
  // varrho = 0 leaves the EE variable as the only objective term
  CHECK(sp.program.objective.sum() == 1.0);
  CHECK(sp.program.objective[sp.layout.ee] == 1.0);

  Eigen::VectorXd x = lift(sp, s, ep, 2.0, 1.0);
  x[sp.layout.sqrt_rate] = ep.r;
  x[sp.layout.ee] = ep.x;
  CHECK(conic::max_violation(sp.program, x) < 1e-9);

  const auto sol = conic::solve(sp.program, tight());
  REQUIRE(sol.ok());
  const LiftedSolution L = recover(sp, s, sol.x);
  CHECK(L.ee >= ep.x - 1e-9);
  CHECK(L.sqrt_rate * L.sqrt_rate <= L.r.sum() + 1e-7);
  CHECK_THROWS_AS(build_scalarization_subproblem(s, ep, -1.0, 1.0, {}), ConfigError);
}

TEST_CASE("feasibility program: slacks vanish at a feasible point and persist on an impossible target") {
  const Scenario s = small(4, 5e4);
  const ExpansionPoint ep = point_at(s, beams(s, 11), 1.0);
  const Subproblem sp = build_feasibility_subproblem(s, ep, 10.0, {});
  const auto sol = conic::solve(sp.program, tight());
  REQUIRE(sol.ok());
  CHECK(recover(sp, s, sol.x).max_slack() <= 1e-6);

  ScenarioConfig c;
  c.num_bs = 1;
  c.antennas_per_bs = 1;
  c.groups_per_bs = 1;
  c.users_per_group = 1;
  c.rate_target_bps = 2e9;  // 100 bit/s/Hz
  const Scenario hard = generate_scenario(c, 1);
  ExpansionPoint hp = point_at(hard, beams(hard, 12), 1.0, false);
  const Subproblem hsp = build_feasibility_subproblem(hard, hp, 10.0, {});
  const auto hs = conic::solve(hsp.program, tight());
  REQUIRE(hs.ok());
  CHECK(recover(hsp, hard, hs.x).mu[0] > 1.0);
  CHECK_THROWS_AS(build_feasibility_subproblem(s, ep, 0.0, {}), ConfigError);
}

TEST_CASE("penalty weight beyond the zero-slack threshold does not move the point") {
  const Scenario s = small(4, 5e4);
  const ExpansionPoint ep = point_at(s, beams(s, 13), 1.0);
  const Subproblem a = build_feasibility_subproblem(s, ep, 10.0, {});
  const Subproblem b = build_feasibility_subproblem(s, ep, 1000.0, {});
  const auto sa = conic::solve(a.program, tight());
  const auto sb = conic::solve(b.program, tight());
  REQUIRE(sa.ok());
  REQUIRE(sb.ok());
  const LiftedSolution la = recover(a, s, sa.x), lb = recover(b, s, sb.x);
  CHECK(la.r.sum() == doctest::Approx(lb.r.sum()).epsilon(1e-6));
}

TEST_CASE("builders reject mismatched expansion points") {
  const Scenario s = small();
  ExpansionPoint ep = point_at(s, beams(s, 14), 1.0);
  ep.beta.resize(1);
  CHECK_THROWS_AS(build_cc_subproblem(s, ep, {}), ConfigError);
}
