// SPDX-License-Identifier: Apache-2.0

#include "jbas/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

namespace jbas {

std::vector<bool> mask_from_bits(std::uint64_t bits, int total) {
  std::vector<bool> m(total);
  for (int j = 0; j < total; ++j) m[j] = (bits >> j) & 1U;
  return m;
}

std::uint64_t bits_from_mask(const std::vector<bool>& mask) {
  std::uint64_t bits = 0;
  for (std::size_t j = 0; j < mask.size(); ++j)
    if (mask[j]) bits |= std::uint64_t{1} << j;
  return bits;
}

const SubsetEntry* OracleReport::find(std::uint64_t bits) const {
  for (const auto& e : table)
    if (e.bits == bits) return &e;
  return nullptr;
}

std::vector<std::uint64_t> admissible_subsets(const Scenario& s) {
  const int total = s.total_antennas();
  if (total > kOracleMaxAntennas)
    throw ConfigError("exhaustive search is limited to " + std::to_string(kOracleMaxAntennas) + " antennas, got " +
                      std::to_string(total));
  const auto need = min_active_antennas(s);
  std::vector<std::uint64_t> out;
  for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << total); ++bits) {
    bool ok = true;
    for (int b = 0; b < s.num_bs && ok; ++b) {
      int c = 0;
      for (int i = 0; i < s.antennas[b]; ++i) c += (bits >> (s.antenna_offset(b) + i)) & 1U;
      ok = c >= need[b];
    }
    if (ok) out.push_back(bits);
  }
  return out;
}

OracleReport exhaustive_antenna_search(const Scenario& s, const SolveOptions& opts, int restarts) {
  if (restarts < 1) throw ConfigError("at least one restart is required");
  OracleReport rep;
  rep.restarts = restarts;
  const int total = s.total_antennas();
  for (std::uint64_t bits : admissible_subsets(s)) {
    const std::vector<bool> mask = mask_from_bits(bits, total);
    SubsetEntry e;
    e.bits = bits;
    for (int r = 0; r < restarts; ++r) {
      SolveOptions o = opts;
      o.start = r;
      const JbasResult res = run_fixed_antennas(s, mask, o);
      if (!res.usable()) continue;
      if (r == 0) e.ee_first = res.ee;
      if (!e.feasible || res.ee > e.ee) {
        e.feasible = true;
        e.ee = res.ee;
        e.sum_rate = res.sum_rate;
        e.power = res.sum_rate > 0.0 ? res.sum_rate / res.ee : total_power(res.w, res.selection, s);
      }
    }
    if (e.feasible && e.ee > rep.best_ee) {
      rep.best_ee = e.ee;
      rep.best_mask = mask;
    }
    rep.table.push_back(e);
  }
  return rep;
}

void write_oracle_csv(const OracleReport& r, std::ostream& os) {
  os << "subset_bitmask,feasible,ee_bits_per_joule,sum_rate_bps,power_w\n";
  os.precision(17);
  for (const auto& e : r.table)
    os << e.bits << ',' << (e.feasible ? 1 : 0) << ',' << e.ee << ',' << e.sum_rate << ',' << e.power << '\n';
}

namespace {

constexpr double kStep = 1e-5;

struct Checker {
  BoundCheckReport& rep;
  double value_tol, grad_tol;

  static double scale(double f) { return std::max(1.0, std::abs(f)); }

  // surrogate must sit below (lower = true) or above the target
  void side(const char* name, int i, double target, double bound, bool lower) {
    ++rep.checks;
    const double excess = (lower ? bound - target : target - bound) / scale(target);
    rep.max_value_gap = std::max(rep.max_value_gap, excess);
    if (excess > value_tol) fail(name, i, "one-sidedness", excess);
  }
  void tight(const char* name, int i, double target, double bound) {
    ++rep.checks;
    const double gap = std::abs(target - bound) / scale(target);
    rep.max_value_gap = std::max(rep.max_value_gap, gap);
    if (gap > value_tol) fail(name, i, "tightness", gap);
  }
  void grad(const char* name, int i, double fd, double exact) {
    ++rep.checks;
    const double gap = std::abs(fd - exact) / scale(exact);
    rep.max_gradient_gap = std::max(rep.max_gradient_gap, gap);
    if (gap > grad_tol) fail(name, i, "first-order tightness", gap);
  }
  void fail(const char* name, int i, const char* what, double gap) {
    rep.failures.push_back(std::string(name) + " sample " + std::to_string(i) + ": " + what + " off by " +
                           std::to_string(gap));
  }
};

Eigen::VectorXcd random_cvec(std::mt19937_64& rng, int n, double sd) {
  std::normal_distribution<double> nd(0.0, sd);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = {nd(rng), nd(rng)};
  return v;
}

}  // namespace

BoundCheckReport check_bounds(int samples, std::uint64_t seed, double value_tol, double grad_tol) {
  BoundCheckReport rep;
  rep.samples = samples;
  Checker ck{rep, value_tol, grad_tol};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, unit(rng)); };

  for (int i = 0; i < samples; ++i) {
    // Psi: |h^H w|^2 / beta
    {
      const int n = 1 + static_cast<int>(unit(rng) * 4);
      const Eigen::VectorXcd h = random_cvec(rng, n, log_uniform(0.1, 10.0));
      const Eigen::VectorXcd wn = random_cvec(rng, n, 1.0);
      const double bn = log_uniform(0.1, 10.0);
      const PsiBound p = psi(h, wn, bn);
      auto f = [&](const Eigen::VectorXcd& w, double b) { return std::norm(h.dot(w)) / b; };
      const Eigen::VectorXcd w = random_cvec(rng, n, 2.0);
      const double b = log_uniform(0.01, 100.0);
      ck.side("psi", i, f(w, b), p(w, b), true);
      ck.tight("psi", i, f(wn, bn), p(wn, bn));
      const Eigen::VectorXcd dw = random_cvec(rng, n, 1.0);
      const double db = unit(rng) - 0.5;
      const double fd = (f(wn + kStep * dw, bn + kStep * db) - f(wn - kStep * dw, bn - kStep * db)) / (2 * kStep);
      ck.grad("psi", i, fd, p(wn + dw, bn + db) - p(wn, bn));
    }
    // Upsilon: a^chi on [0, 1]
    {
      const double chi = 1.0 + 3.0 * unit(rng);
      const double an = 0.01 + 0.98 * unit(rng);
      const UpsilonBound u = upsilon(an, chi);
      const double a = unit(rng);
      ck.side("upsilon", i, std::pow(a, chi), u(a), true);
      ck.tight("upsilon", i, std::pow(an, chi), u(an));
      const double fd = (std::pow(an + kStep, chi) - std::pow(an - kStep, chi)) / (2 * kStep);
      ck.grad("upsilon", i, fd, u.slope);
    }
    // Xi: log(1 + gamma)
    {
      const double gn = log_uniform(1e-2, 1e3);
      const XiBound x = xi(gn);
      const double g = log_uniform(1e-3, 1e4);
      ck.side("xi", i, std::log1p(g), x(g), true);
      ck.tight("xi", i, std::log1p(gn), x(gn));
      const double h = kStep * gn;
      const double fd = (std::log1p(gn + h) - std::log1p(gn - h)) / (2 * h);
      ck.grad("xi", i, fd, x.nu1 / (gn * gn));
    }
    // Delta: r^2 / x
    {
      const double rn = log_uniform(0.1, 10.0), xn = log_uniform(0.1, 10.0);
      const DeltaBound d = delta(rn, xn);
      const double r = log_uniform(0.01, 100.0), x = log_uniform(0.01, 100.0);
      ck.side("delta", i, r * r / x, d(r, x), true);
      ck.tight("delta", i, rn * rn / xn, d(rn, xn));
      const double dr = unit(rng) - 0.5, dx = unit(rng) - 0.5;
      auto f = [](double a, double b) { return a * a / b; };
      const double fd = (f(rn + kStep * dr, xn + kStep * dx) - f(rn - kStep * dr, xn - kStep * dx)) / (2 * kStep);
      ck.grad("delta", i, fd, d.cr * dr - d.cx * dx);
    }
    // f2 and f3 majorants in the per-antenna norms
    for (SmoothingKind kind : {SmoothingKind::f2, SmoothingKind::f3}) {
      const char* name = kind == SmoothingKind::f2 ? "f2" : "f3";
      const int n = 1 + static_cast<int>(unit(rng) * 6);
      const double varsigma = 1.0 + 3.0 * unit(rng);
      const double p_max = log_uniform(0.1, 10.0);
      const double root = std::sqrt(p_max);
      Eigen::VectorXd phin(n), phi(n), dir(n);
      for (int j = 0; j < n; ++j) {
        phin[j] = 0.01 + 0.99 * unit(rng);
        phi[j] = unit(rng);
        dir[j] = unit(rng) - 0.5;
      }
      const SmoothingMajorant m = smoothing_majorant(phin, p_max, kind, varsigma);
      auto f = [&](const Eigen::VectorXd& p) {
        double t = 0.0;
        for (int j = 0; j < n; ++j) t += smoothing_term(p[j], kind, varsigma);
        return t;
      };
      ck.side(name, i, f(phi), m(phi * root), false);
      ck.tight(name, i, f(phin), m(phin * root));
      const double fd = (f(phin + kStep * dir) - f(phin - kStep * dir)) / (2 * kStep);
      ck.grad(name, i, fd, m.slope.dot(dir * root));
    }
  }
  return rep;
}

ActivityReport check_sinr_activity(const JbasResult& r, const Scenario& s, double rel_tol) {
  ActivityReport rep;
  for (int g = 0; g < s.num_groups(); ++g) {
    int worst = -1;
    double worst_sinr = 0.0;
    for (int k : s.groups[g].users) {
      const double v = sinr(r.w, s, k);
      if (worst < 0 || v < worst_sinr) {
        worst = k;
        worst_sinr = v;
      }
    }
    rep.worst_user.push_back(worst);
    double gap = 1.0;
    if (r.gamma.size() == s.num_users() && worst_sinr > 0.0) gap = std::abs(r.gamma[worst] - worst_sinr) / worst_sinr;
    rep.relative_gap.push_back(gap);
    if (!(gap <= rel_tol)) rep.inactive_groups.push_back(g);
  }
  return rep;
}

}  // namespace jbas
