// SPDX-License-Identifier: Apache-2.0

#include "jbas/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

namespace jbas {

void SolveOptions::validate() const {
  if (!(chi >= 1.0)) throw ConfigError("chi must be at least 1");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw ConfigError("epsilon must lie in (0, 0.5)");
  if (max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (!(rel_tol > 0.0)) throw ConfigError("rel_tol must be positive");
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw ConfigError("kappa must lie in [0, 1]");
  if (!(varrho >= 0.0)) throw ConfigError("varrho must be nonnegative");
  if (!(rho >= 0.0)) throw ConfigError("rho must be nonnegative");
  if (!(varsigma >= 1.0)) throw ConfigError("varsigma must be at least 1");
  if (!(solver_tol > 0.0 && solver_tol < 1e-3)) throw ConfigError("solver tolerance must lie in (0, 1e-3)");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(slack_tol > 0.0)) throw ConfigError("slack_tol must be positive");
  if (init_max_iter < 1) throw ConfigError("init_max_iter must be at least 1");
  if (start < 0) throw ConfigError("start index must be nonnegative");
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::iteration_limit: return "iteration_limit";
    case RunStatus::infeasible: return "infeasible";
    case RunStatus::solver_failure: return "solver_failure";
    case RunStatus::fallback: return "fallback";
  }
  return "?";
}

std::vector<double> RunTrace::objectives(int phase) const {
  std::vector<double> out;
  for (const auto& r : records)
    if (r.phase == phase) out.push_back(r.objective);
  return out;
}

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::alg1: return "alg1";
    case Algorithm::alg1_simple: return "alg1-simple";
    case Algorithm::alg2_f1: return "alg2-f1";
    case Algorithm::alg2_f2: return "alg2-f2";
    case Algorithm::alg2_f3: return "alg2-f3";
    case Algorithm::pwee: return "pwee";
    case Algorithm::alg3: return "alg3";
    case Algorithm::no_as: return "no-as";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& name) {
  for (Algorithm a : {Algorithm::alg1, Algorithm::alg1_simple, Algorithm::alg2_f1, Algorithm::alg2_f2,
                      Algorithm::alg2_f3, Algorithm::pwee, Algorithm::alg3, Algorithm::no_as})
    if (name == to_string(a)) return a;
  throw ConfigError("unknown algorithm '" + name + "'");
}

namespace {

constexpr double kMinPhi = 1e-9;

conic::SolverSettings solver_settings(const SolveOptions& o) {
  conic::SolverSettings st;
  st.tol_feas = o.solver_tol;
  st.tol_gap = o.solver_tol;
  st.max_iter = 150;
  return st;
}

struct Step {
  bool ok = false;
  LiftedSolution sol;
  double ms = 0.0;
  conic::SolveStatus status = conic::SolveStatus::numerical_failure;
};

// A tight tolerance occasionally stalls on the last digits; one retry at 1e-8 keeps the loop going.
Step solve_step(const Subproblem& sp, const Scenario& s, const SolveOptions& o) {
  conic::SolverSettings st = solver_settings(o);
  conic::ConicSolution res = conic::solve(sp.program, st);
  Step step;
  step.ms = res.solve_ms;
  if (!res.ok() && res.status != conic::SolveStatus::infeasible && o.solver_tol < 1e-8) {
    st.tol_feas = st.tol_gap = 1e-8;
    st.max_iter = 300;
    res = conic::solve(sp.program, st);
    step.ms += res.solve_ms;
  }
  step.status = res.status;
  if (!res.ok()) return step;
  // a vanishing scale variable means only the trivial lifted point is feasible
  if (sp.layout.lifted && !(res.x[sp.layout.phi] > kMinPhi)) {
    step.status = conic::SolveStatus::infeasible;
    return step;
  }
  step.ok = true;
  step.sol = recover(sp, s, res.x);
  return step;
}

std::vector<bool> full_mask(const Scenario& s) { return std::vector<bool>(s.total_antennas(), true); }

double count_true(const std::vector<bool>& m) { return static_cast<double>(std::count(m.begin(), m.end(), true)); }

BeamformerSet apply_mask(const Scenario& s, BeamformerSet w, const std::vector<bool>& mask) {
  for (int g = 0; g < s.num_groups(); ++g) {
    const int b = s.groups[g].bs;
    for (int i = 0; i < s.antennas[b]; ++i)
      if (!mask[s.antenna_offset(b) + i]) w.w[g][i] = 0.0;
  }
  return w;
}

// Expansion point at the actual interference and SINR of w.
ExpansionPoint actual_point(const Scenario& s, const BeamformerSet& w, const Eigen::VectorXd& a) {
  ExpansionPoint ep;
  ep.w = w;
  ep.a = a;
  const int K = s.num_users();
  ep.beta.resize(K);
  ep.gamma.resize(K);
  const double n0 = s.power.noise_linear();
  for (int k = 0; k < K; ++k) {
    ep.beta[k] = interference_plus_noise(w, s, k) / n0;
    ep.gamma[k] = sinr(w, s, k);
  }
  return ep;
}

Eigen::VectorXd mask_vector(const std::vector<bool>& mask) {
  Eigen::VectorXd a(static_cast<int>(mask.size()));
  for (std::size_t j = 0; j < mask.size(); ++j) a[static_cast<int>(j)] = mask[j] ? 1.0 : 0.0;
  return a;
}

SelectionState selection_for(const Scenario& s, const BeamformerSet& w, const std::vector<bool>& mask,
                             const Eigen::VectorXd& a) {
  SelectionState st;
  st.mask = mask;
  st.a = a;
  st.v.resize(s.total_antennas());
  for (int b = 0; b < s.num_bs; ++b)
    for (int i = 0; i < s.antennas[b]; ++i) st.v[s.antenna_offset(b) + i] = w.antenna_power(s, b, i);
  return st;
}

TraceRecord make_record(const Scenario& s, int iter, int phase, const Step& step, const BeamformerSet& w,
                        const std::vector<bool>& mask, double active_estimate) {
  TraceRecord rec;
  rec.iter = iter;
  rec.phase = phase;
  rec.objective = step.sol.objective;
  SelectionState st;
  st.mask = mask;
  rec.sum_rate_bps = sum_rate(w, s);
  rec.power_w = total_power(w, st, s);
  rec.ee_bits_per_joule = rec.sum_rate_bps / rec.power_w;
  rec.active_antennas = active_estimate;
  rec.solve_ms = step.ms;
  return rec;
}

// Mask of scores >= eps, topped up per BS with the best remaining scores until the minimum counts hold.
std::vector<bool> round_mask(const Scenario& s, const Eigen::VectorXd& score, double eps) {
  std::vector<bool> mask(s.total_antennas(), false);
  for (int j = 0; j < s.total_antennas(); ++j) mask[j] = score[j] >= eps;
  const auto need = min_active_antennas(s);
  for (int b = 0; b < s.num_bs; ++b) {
    const int off = s.antenna_offset(b);
    auto count = [&] {
      int c = 0;
      for (int i = 0; i < s.antennas[b]; ++i) c += mask[off + i];
      return c;
    };
    while (count() < std::min(need[b], s.antennas[b])) {
      int best = -1;
      for (int i = 0; i < s.antennas[b]; ++i)
        if (!mask[off + i] && (best < 0 || score[off + i] > score[off + best])) best = i;
      mask[off + best] = true;
    }
  }
  return mask;
}

struct LoopOutcome {
  bool have = false;  // at least one subproblem solved
  LiftedSolution last;
  ExpansionPoint ep;
  RunStatus status = RunStatus::iteration_limit;
  conic::SolveStatus first_failure = conic::SolveStatus::optimal;
};

// Generic SCA iteration: build around ep, solve, record, move ep. Stops on a
// relative objective change below rel_tol, the iteration cap, or a failed solve.
LoopOutcome sca_loop(const Scenario& s, ExpansionPoint ep, int phase, const SolveOptions& o, RunTrace& trace,
                     const std::function<Subproblem(const ExpansionPoint&)>& build,
                     const std::function<void(const LiftedSolution&, ExpansionPoint&)>& advance,
                     const std::function<std::pair<std::vector<bool>, double>(const LiftedSolution&)>& report) {
  LoopOutcome out;
  out.ep = ep;
  double prev = 0.0;
  for (int it = 0; it < o.max_iter; ++it) {
    const Subproblem sp = build(out.ep);
    Step step = solve_step(sp, s, o);
    if (!step.ok) {
      out.status = RunStatus::solver_failure;
      out.first_failure = step.status;
      return out;
    }
    const auto [mask, active] = report(step.sol);
    trace.records.push_back(make_record(s, it, phase, step, step.sol.w, mask, active));
    const double obj = step.sol.objective;
    out.last = std::move(step.sol);
    out.have = true;
    advance(out.last, out.ep);
    if (it > 0 && std::abs(obj - prev) < o.rel_tol * std::max(std::abs(prev), 1e-300)) {
      out.status = RunStatus::converged;
      return out;
    }
    prev = obj;
  }
  out.status = RunStatus::iteration_limit;
  return out;
}

void advance_program_values(const LiftedSolution& sol, ExpansionPoint& ep) {
  ep.w = sol.w;
  ep.beta = sol.beta;
  ep.gamma = sol.gamma;
  ep.a = sol.a.cwiseMax(0.0).cwiseMin(1.0);
}

BuildOptions build_options(const SolveOptions& o) {
  BuildOptions b;
  b.chi = o.chi;
  b.kappa = o.kappa;
  b.rate_path = o.backend_path;
  b.min_antennas = o.min_antennas;
  return b;
}

JbasResult finish(const Scenario& s, const BeamformerSet& w, const std::vector<bool>& mask, const Eigen::VectorXd& a,
                  RunTrace trace, RunStatus status, const LiftedSolution* sol) {
  JbasResult r;
  r.w = apply_mask(s, w, mask);
  r.selection = selection_for(s, r.w, mask, a);
  r.sum_rate = sum_rate(r.w, s);
  r.ee = energy_efficiency(r.w, r.selection, s);
  r.group_rates = group_rates(r.w, s);
  if (sol) {
    r.gamma = sol->gamma;
    r.beta = sol->beta;
  }
  r.status = status;
  trace.status = status;
  r.trace = std::move(trace);
  return r;
}

JbasResult infeasible_result(const Scenario& s, const InitResult& init) {
  JbasResult r;
  r.w = BeamformerSet::zeros(s);
  r.selection = SelectionState::all_on(s);
  r.status = RunStatus::infeasible;
  r.trace.status = RunStatus::infeasible;
  r.note = init.message;
  return r;
}

// Point handed from phase 1 to phase 2: rows off the mask zeroed, actual SINR.
ExpansionPoint rounded_point(const Scenario& s, const BeamformerSet& w, const std::vector<bool>& mask) {
  return actual_point(s, apply_mask(s, w, mask), mask_vector(mask));
}

// Antenna set refit shared by every driver. Restores the best removed antennas
// (by score) when the rounded set cannot be made to work.
struct RefitOutcome {
  bool ok = false;
  LoopOutcome loop;
  std::vector<bool> mask;
  int restored = 0;
};

RefitOutcome refit(const Scenario& s, const BeamformerSet& w_phase1, std::vector<bool> mask,
                   const Eigen::VectorXd& score, const SolveOptions& o, RunTrace& trace,
                   const std::function<Subproblem(const ExpansionPoint&, const std::vector<bool>&)>& build,
                   const std::function<void(const LiftedSolution&, ExpansionPoint&)>& advance,
                   const std::function<void(ExpansionPoint&, const std::vector<bool>&)>& prepare) {
  RefitOutcome out;
  for (int attempt = 0; attempt <= 3; ++attempt) {
    ExpansionPoint ep = rounded_point(s, w_phase1, mask);
    if (prepare) prepare(ep, mask);
    RunTrace local;
    const auto report = [&](const LiftedSolution&) { return std::make_pair(mask, count_true(mask)); };
    LoopOutcome loop = sca_loop(
        s, ep, 2, o, local, [&](const ExpansionPoint& p) { return build(p, mask); }, advance, report);
    if (loop.have) {
      trace.records.insert(trace.records.end(), local.records.begin(), local.records.end());
      out.ok = true;
      out.loop = std::move(loop);
      out.mask = mask;
      out.restored = attempt;
      return out;
    }
    int best = -1;
    for (int j = 0; j < s.total_antennas(); ++j)
      if (!mask[j] && (best < 0 || score[j] > score[best])) best = j;
    if (best < 0) break;
    mask[best] = true;
  }
  return out;
}

std::string restored_note(int n) {
  return n == 0 ? std::string() : "restored " + std::to_string(n) + " antenna(s) after rounding";
}

// Phase 1 of the relaxed selection program.
struct SelectionPhase {
  InitResult init;
  LoopOutcome loop;
  RunTrace trace;
};

SelectionPhase selection_phase(const Scenario& s, const SolveOptions& o) {
  SelectionPhase ph;
  ph.init = initialize_feasible(s, o);
  if (!ph.init.feasible) return ph;
  const BuildOptions bo = build_options(o);
  ph.loop = sca_loop(
      s, ph.init.point, 1, o, ph.trace, [&](const ExpansionPoint& ep) { return build_cc_subproblem(s, ep, bo); },
      advance_program_values,
      [&](const LiftedSolution& sol) {
        std::vector<bool> m(s.total_antennas());
        for (int j = 0; j < s.total_antennas(); ++j) m[j] = sol.a[j] >= o.epsilon;
        return std::make_pair(m, sol.a.sum());
      });
  return ph;
}

JbasResult simple_from_phase(const Scenario& s, const SelectionPhase& ph, const SolveOptions& o) {
  const Eigen::VectorXd a = ph.loop.have ? ph.loop.last.a : ph.init.point.a;
  const BeamformerSet& w = ph.loop.have ? ph.loop.last.w : ph.init.point.w;
  const std::vector<bool> mask = round_mask(s, a, o.epsilon);
  return finish(s, w, mask, a, ph.trace, ph.loop.status, ph.loop.have ? &ph.loop.last : nullptr);
}

// Phase 1 statuses that still leave a usable point for phase 2.
bool usable_phase(const LoopOutcome& l) { return l.have; }

JbasResult selection_driver(const Scenario& s, const SolveOptions& o) {
  o.validate();
  SelectionPhase ph = selection_phase(s, o);
  if (!ph.init.feasible) return infeasible_result(s, ph.init);
  if (!usable_phase(ph.loop)) {
    JbasResult r = finish(s, ph.init.point.w, full_mask(s), ph.init.point.a, ph.trace, RunStatus::solver_failure,
                          nullptr);
    r.note = std::string("phase 1 failed: ") + conic::to_string(ph.loop.first_failure);
    return r;
  }
  const Eigen::VectorXd a = ph.loop.last.a;
  BuildOptions bo = build_options(o);
  RunTrace trace = ph.trace;
  RefitOutcome rf = refit(
      s, ph.loop.last.w, round_mask(s, a, o.epsilon), a, o, trace,
      [&](const ExpansionPoint& ep, const std::vector<bool>& mask) {
        BuildOptions b = bo;
        b.mask = mask;
        return build_cc_subproblem(s, ep, b);
      },
      advance_program_values, nullptr);
  if (!rf.ok) {
    JbasResult r = simple_from_phase(s, ph, o);
    r.status = RunStatus::fallback;
    r.trace.status = RunStatus::fallback;
    r.note = "phase 2 infeasible after rounding; thresholded phase-1 point returned";
    return r;
  }
  RunStatus st = rf.loop.status;
  if (ph.loop.status == RunStatus::solver_failure) st = RunStatus::solver_failure;
  JbasResult r = finish(s, rf.loop.last.w, rf.mask, a, std::move(trace), st, &rf.loop.last);
  r.note = restored_note(rf.restored);
  return r;
}

}  // namespace

InitResult initialize_feasible(const Scenario& s, const SolveOptions& opts, const std::vector<bool>& mask_in) {
  opts.validate();
  const std::vector<bool> mask = mask_in.empty() ? full_mask(s) : mask_in;
  if (static_cast<int>(mask.size()) != s.total_antennas()) throw ConfigError("antenna mask has the wrong length");

  std::mt19937_64 rng(s.seed * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL * static_cast<std::uint64_t>(opts.start + 1));
  std::normal_distribution<double> normal(0.0, 1.0);
  BeamformerSet w = BeamformerSet::zeros(s);
  for (int g = 0; g < s.num_groups(); ++g) {
    const int b = s.groups[g].bs;
    const double groups_here = static_cast<double>(s.groups_of_bs(b).size());
    const double sd = std::sqrt(0.01 * s.power.p_max / groups_here / 2.0);
    for (int i = 0; i < s.antennas[b]; ++i) {
      const double re = normal(rng), im = normal(rng);
      if (mask[s.antenna_offset(b) + i]) w.w[g][i] = {sd * re, sd * im};
    }
  }

  BuildOptions bo;
  bo.rate_path = opts.backend_path;
  if (!mask_in.empty()) bo.mask = mask;
  const Eigen::VectorXd a = mask_vector(mask);

  InitResult res;
  res.lambda = opts.lambda;
  ExpansionPoint ep = actual_point(s, w, a);
  double best = std::numeric_limits<double>::infinity();
  int stall = 0, escalations = 0;
  LiftedSolution last;
  for (int it = 0; it < opts.init_max_iter; ++it) {
    res.iterations = it + 1;
    const Subproblem sp = build_feasibility_subproblem(s, ep, res.lambda, bo);
    Step step = solve_step(sp, s, opts);
    if (!step.ok) {
      res.message = std::string("feasibility subproblem failed: ") + conic::to_string(step.status);
      return res;
    }
    last = step.sol;
    // cap per-antenna powers exactly, then re-expand at the actual SINR
    BeamformerSet wn = apply_mask(s, last.w, mask);
    for (int b = 0; b < s.num_bs; ++b)
      for (int i = 0; i < s.antennas[b]; ++i) {
        const double p = wn.antenna_power(s, b, i);
        if (p > s.power.p_max) {
          const double scale = std::sqrt(s.power.p_max / p);
          for (int g : s.groups_of_bs(b)) wn.w[g][i] *= scale;
        }
      }
    ep = actual_point(s, wn, a);

    const double slack = last.max_slack();
    bool rates_ok = true;
    const auto rates = group_rates_nats(wn, s);
    for (int g = 0; g < s.num_groups(); ++g) rates_ok = rates_ok && rates[g] >= s.group_target_nats(g);
    if (slack <= opts.slack_tol && rates_ok) {
      res.feasible = true;
      res.point = ep;
      return res;
    }
    if (slack < 0.99 * best) {
      best = slack;
      stall = 0;
    } else if (++stall >= 5) {
      if (escalations == 3) break;
      ++escalations;
      res.lambda *= 10.0;
      stall = 0;
      best = std::numeric_limits<double>::infinity();
    }
  }
  for (int g = 0; g < s.num_groups(); ++g) {
    bool bad = last.mu.size() > g && last.mu[g] > opts.slack_tol;
    for (int k : s.groups[g].users)
      bad = bad || (last.q1.size() > k && last.q1[k] > opts.slack_tol) ||
            (last.q2.size() > k && last.q2[k] > opts.slack_tol);
    if (bad) res.violated_groups.push_back(g);
  }
  std::ostringstream msg;
  msg << "no feasible point after " << res.iterations << " iterations (lambda " << res.lambda << "); violated groups:";
  for (int g : res.violated_groups) msg << ' ' << g;
  res.message = msg.str();
  return res;
}

JbasResult run_algorithm1(const Scenario& s, const SolveOptions& opts) { return selection_driver(s, opts); }

JbasResult run_pwee(const Scenario& s, double kappa, const SolveOptions& opts) {
  SolveOptions o = opts;
  o.kappa = kappa;
  return selection_driver(s, o);
}

JbasResult run_algorithm1_simple(const Scenario& s, const SolveOptions& opts) {
  opts.validate();
  SelectionPhase ph = selection_phase(s, opts);
  if (!ph.init.feasible) return infeasible_result(s, ph.init);
  return simple_from_phase(s, ph, opts);
}

JbasResult run_fixed_antennas(const Scenario& s, const std::vector<bool>& mask, const SolveOptions& opts) {
  opts.validate();
  const InitResult init = initialize_feasible(s, opts, mask);
  if (!init.feasible) return infeasible_result(s, init);
  BuildOptions bo = build_options(opts);
  bo.mask = mask;
  RunTrace trace;
  LoopOutcome loop = sca_loop(
      s, init.point, 1, opts, trace, [&](const ExpansionPoint& ep) { return build_cc_subproblem(s, ep, bo); },
      advance_program_values, [&](const LiftedSolution&) { return std::make_pair(mask, count_true(mask)); });
  if (!loop.have) {
    JbasResult r = finish(s, init.point.w, mask, mask_vector(mask), std::move(trace), RunStatus::solver_failure,
                          nullptr);
    r.note = std::string("subproblem failed: ") + conic::to_string(loop.first_failure);
    return r;
  }
  return finish(s, loop.last.w, mask, mask_vector(mask), std::move(trace), loop.status, &loop.last);
}

JbasResult run_no_as_baseline(const Scenario& s, const SolveOptions& opts) {
  return run_fixed_antennas(s, full_mask(s), opts);
}

JbasResult run_algorithm2(const Scenario& s, SmoothingKind kind, const SolveOptions& opts) {
  opts.validate();
  const InitResult init = initialize_feasible(s, opts);
  if (!init.feasible) return infeasible_result(s, init);
  const BuildOptions bo = build_options(opts);
  RunTrace trace;
  const auto norms_mask = [&](const BeamformerSet& w) {
    const Eigen::VectorXd phi = normalized_antenna_norms(w, s);
    std::vector<bool> m(s.total_antennas());
    for (int j = 0; j < s.total_antennas(); ++j) m[j] = phi[j] >= opts.epsilon;
    return std::make_pair(m, count_true(m));
  };
  LoopOutcome loop = sca_loop(
      s, init.point, 1, opts, trace,
      [&](const ExpansionPoint& ep) {
        return build_sparsity_subproblem(s, ep, kind, opts.rho, opts.varsigma, bo);
      },
      advance_program_values, [&](const LiftedSolution& sol) { return norms_mask(sol.w); });
  if (!loop.have) {
    JbasResult r = finish(s, init.point.w, full_mask(s), init.point.a, std::move(trace), RunStatus::solver_failure,
                          nullptr);
    r.note = std::string("phase 1 failed: ") + conic::to_string(loop.first_failure);
    return r;
  }
  const Eigen::VectorXd score = normalized_antenna_norms(loop.last.w, s);
  BuildOptions fixed = bo;
  fixed.kappa = 1.0;
  RefitOutcome rf = refit(
      s, loop.last.w, round_mask(s, score, opts.epsilon), score, opts, trace,
      [&](const ExpansionPoint& ep, const std::vector<bool>& mask) {
        BuildOptions b = fixed;
        b.mask = mask;
        return build_cc_subproblem(s, ep, b);
      },
      advance_program_values, nullptr);
  if (!rf.ok) {
    JbasResult r = finish(s, loop.last.w, round_mask(s, score, opts.epsilon), score, std::move(trace),
                          RunStatus::fallback, &loop.last);
    r.note = "phase 2 infeasible after rounding; thresholded phase-1 point returned";
    return r;
  }
  RunStatus st = loop.status == RunStatus::solver_failure ? RunStatus::solver_failure : rf.loop.status;
  JbasResult r = finish(s, rf.loop.last.w, rf.mask, score, std::move(trace), st, &rf.loop.last);
  r.note = restored_note(rf.restored);
  return r;
}

namespace {

// r = sqrt(sum rate) and x = EE of a point, both in the program's units.
void set_scalarization_anchor(const Scenario& s, ExpansionPoint& ep, const std::vector<bool>& mask) {
  const auto rates = group_rates_nats(ep.w, s);
  double total = 0.0;
  for (double r : rates) total += r;
  double tx = 0.0;
  for (const auto& wg : ep.w.w) tx += wg.squaredNorm();
  const double power = tx / s.power.eta + s.power.p_rf * count_true(mask) + s.p0();
  ep.r = std::sqrt(total);
  ep.x = total / power;
}

void advance_scalarization(const LiftedSolution& sol, ExpansionPoint& ep) {
  advance_program_values(sol, ep);
  ep.r = sol.sqrt_rate;
  ep.x = sol.ee;
}

}  // namespace

JbasResult run_algorithm3(const Scenario& s, double varrho, const SolveOptions& opts) {
  SolveOptions o = opts;
  o.varrho = varrho;
  o.validate();
  const InitResult init = initialize_feasible(s, o);
  if (!init.feasible) return infeasible_result(s, init);
  const BuildOptions bo = build_options(o);
  const double p_min = minimum_power(s);
  ExpansionPoint ep0 = init.point;
  set_scalarization_anchor(s, ep0, full_mask(s));
  if (!(ep0.r > 0.0)) {
    JbasResult r = infeasible_result(s, init);
    r.note = "initial point carries no rate; scalarization cannot be anchored";
    return r;
  }
  RunTrace trace;
  LoopOutcome loop = sca_loop(
      s, ep0, 1, o, trace,
      [&](const ExpansionPoint& ep) { return build_scalarization_subproblem(s, ep, varrho, p_min, bo); },
      advance_scalarization,
      [&](const LiftedSolution& sol) {
        std::vector<bool> m(s.total_antennas());
        for (int j = 0; j < s.total_antennas(); ++j) m[j] = sol.a[j] >= o.epsilon;
        return std::make_pair(m, sol.a.sum());
      });
  if (!loop.have) {
    JbasResult r = finish(s, init.point.w, full_mask(s), init.point.a, std::move(trace), RunStatus::solver_failure,
                          nullptr);
    r.note = std::string("phase 1 failed: ") + conic::to_string(loop.first_failure);
    return r;
  }
  const Eigen::VectorXd a = loop.last.a;
  RefitOutcome rf = refit(
      s, loop.last.w, round_mask(s, a, o.epsilon), a, o, trace,
      [&](const ExpansionPoint& ep, const std::vector<bool>& mask) {
        BuildOptions b = bo;
        b.mask = mask;
        return build_scalarization_subproblem(s, ep, varrho, p_min, b);
      },
      advance_scalarization,
      [&](ExpansionPoint& ep, const std::vector<bool>& mask) { set_scalarization_anchor(s, ep, mask); });
  if (!rf.ok) {
    const std::vector<bool> mask = round_mask(s, a, o.epsilon);
    JbasResult r = finish(s, loop.last.w, mask, a, std::move(trace), RunStatus::fallback, &loop.last);
    r.note = "phase 2 infeasible after rounding; thresholded phase-1 point returned";
    return r;
  }
  RunStatus st = loop.status == RunStatus::solver_failure ? RunStatus::solver_failure : rf.loop.status;
  JbasResult r = finish(s, rf.loop.last.w, rf.mask, a, std::move(trace), st, &rf.loop.last);
  r.note = restored_note(rf.restored);
  return r;
}

JbasResult run_algorithm(Algorithm alg, const Scenario& s, const SolveOptions& opts) {
  switch (alg) {
    case Algorithm::alg1: return run_algorithm1(s, opts);
    case Algorithm::alg1_simple: return run_algorithm1_simple(s, opts);
    case Algorithm::alg2_f1: return run_algorithm2(s, SmoothingKind::f1, opts);
    case Algorithm::alg2_f2: return run_algorithm2(s, SmoothingKind::f2, opts);
    case Algorithm::alg2_f3: return run_algorithm2(s, SmoothingKind::f3, opts);
    case Algorithm::pwee: return run_pwee(s, opts.kappa, opts);
    case Algorithm::alg3: return run_algorithm3(s, opts.varrho, opts);
    case Algorithm::no_as: return run_no_as_baseline(s, opts);
  }
  throw ConfigError("unknown algorithm");
}

std::vector<std::string> check_result_feasibility(const JbasResult& r, const Scenario& s, double power_tol,
                                                  double rate_rel_tol) {
  std::vector<std::string> issues;
  for (int b = 0; b < s.num_bs; ++b)
    for (int i = 0; i < s.antennas[b]; ++i) {
      const int j = s.antenna_offset(b) + i;
      const double p = r.w.antenna_power(s, b, i);
      if (p > s.power.p_max + power_tol)
        issues.push_back("antenna " + std::to_string(j) + " power " + std::to_string(p) + " exceeds the cap");
      if (!r.selection.mask.empty() && !r.selection.mask[j])
        for (int g : s.groups_of_bs(b))
          if (r.w.w[g][i] != std::complex<double>(0.0, 0.0))
            issues.push_back("antenna " + std::to_string(j) + " is off but carries a nonzero coefficient");
    }
  const auto rates = group_rates(r.w, s);
  for (int g = 0; g < s.num_groups(); ++g) {
    double target = 0.0;
    for (int k : s.groups[g].users) target = std::max(target, s.rate_targets_bps[k]);
    if (rates[g] < target * (1.0 - rate_rel_tol))
      issues.push_back("group " + std::to_string(g) + " rate " + std::to_string(rates[g]) + " below target " +
                       std::to_string(target));
  }
  return issues;
}

}  // namespace jbas
