// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Optional arguments restrict the run to
// the listed criterion numbers.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "jbas/experiment.hpp"
#include "jbas/oracle.hpp"

using namespace jbas;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Scenario make(int n, double rate, std::uint64_t seed, int u = 2, int l = 2) {
  ScenarioConfig c;
  c.antennas_per_bs = n;
  c.groups_per_bs = u;
  c.users_per_group = l;
  c.rate_target_bps = rate;
  return generate_scenario(c, seed);
}

bool nondecreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[i - 1] - 1e-9 * std::max(1.0, std::abs(v[i - 1]))) return false;
  return true;
}

bool same_trace(const RunTrace& a, const RunTrace& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto &x = a.records[i], &y = b.records[i];
    if (x.phase != y.phase || x.objective != y.objective || x.ee_bits_per_joule != y.ee_bits_per_joule ||
        x.sum_rate_bps != y.sum_rate_bps || x.active_antennas != y.active_antennas)
      return false;
  }
  return true;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

constexpr int kSeeds = 20;
constexpr double kRate = 20e6;

// Runs cached by (tag, seed) together with their scenario so criteria can share them.
struct CachedRun {
  Scenario scenario;
  JbasResult result;
};

class Runs {
 public:
  const JbasResult& get(const std::string& tag, std::uint64_t seed, const Scenario& s,
                        const std::function<JbasResult(const Scenario&)>& run) {
    auto key = std::make_pair(tag, seed);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, CachedRun{s, run(s)}).first;
    return it->second.result;
  }
  const std::map<std::pair<std::string, std::uint64_t>, CachedRun>& all() const { return cache_; }

 private:
  std::map<std::pair<std::string, std::uint64_t>, CachedRun> cache_;
};

Runs runs;

const JbasResult& n8(Algorithm a, std::uint64_t seed, double kappa = 1.0, double varrho = 0.0) {
  const std::string tag = std::string("n8-") + to_string(a) + fmt("-%g-%g", kappa, varrho);
  return runs.get(tag, seed, make(8, kRate, seed), [&](const Scenario& s) {
    SolveOptions o;
    o.kappa = kappa;
    o.varrho = varrho;
    return run_algorithm(a, s, o);
  });
}

const JbasResult& n16(Algorithm a, std::uint64_t seed) {
  return runs.get(std::string("n16-") + to_string(a), seed, make(16, kRate, seed),
                  [&](const Scenario& s) { return run_algorithm(a, s, {}); });
}

struct Verdict {
  bool pass;
  std::string detail;
};

Verdict c1() {
  const auto t0 = Clock::now();
  const BoundCheckReport r = check_bounds(1000, 2024);
  const double t = seconds_since(t0);
  return {r.passed() && t < 10.0,
          std::to_string(r.checks) + " checks, " + std::to_string(r.failures.size()) + " violations" +
              fmt(", worst value gap %.2e, worst gradient gap %.2e, %.1f s", r.max_value_gap, r.max_gradient_gap, t)};
}

Verdict c2() {
  const auto t0 = Clock::now();
  int sequences = 0, bad = 0;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed)
    for (const JbasResult* r : {&n8(Algorithm::alg1, seed), &n8(Algorithm::alg2_f3, seed),
                                &n8(Algorithm::alg3, seed), &n8(Algorithm::pwee, seed, 0.5)}) {
      if (r->status == RunStatus::infeasible) continue;
      ++sequences;
      bad += !nondecreasing(r->trace.objectives(1));
    }
  const double t = seconds_since(t0);
  return {bad == 0 && sequences > 0 && t < 600.0,
          std::to_string(sequences - bad) + "/" + std::to_string(sequences) + " phase-1 sequences nondecreasing" +
              fmt(", %.0f s", t)};
}

Verdict c3() {
  // ensure the main pools exist, then check every usable run computed so far
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    n8(Algorithm::alg1, seed);
    n16(Algorithm::alg1, seed);
  }
  int checked = 0, bad = 0;
  std::string first;
  for (const auto& [key, run] : runs.all()) {
    const JbasResult& r = run.result;
    if (!r.usable()) continue;
    const Scenario& s = run.scenario;
    ++checked;
    const auto issues = check_result_feasibility(r, s);
    if (!issues.empty()) {
      ++bad;
      if (first.empty()) first = key.first + " seed " + std::to_string(key.second) + ": " + issues.front();
    }
  }
  return {bad == 0 && checked > 0,
          std::to_string(checked - bad) + "/" + std::to_string(checked) + " usable runs feasible" +
              (first.empty() ? "" : "; first issue " + first)};
}

Verdict c4() {
  const auto t0 = Clock::now();
  int good = 0, total = 0;
  double worst = 1.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    ScenarioConfig c;
    c.antennas_per_bs = 3;
    c.groups_per_bs = 1;
    c.users_per_group = 1;
    c.rate_target_bps = 0.0;
    const Scenario s = generate_scenario(c, seed);
    const OracleReport rep = exhaustive_antenna_search(s, {});
    const JbasResult r = run_algorithm1(s, {});
    ++total;
    const double ratio = r.usable() ? rep.ratio(r) : 0.0;
    worst = std::min(worst, ratio);
    good += ratio >= 0.95;
  }
  const double t = seconds_since(t0);
  return {good >= 0.8 * total && t < 900.0,
          std::to_string(good) + "/" + std::to_string(total) +
              fmt(" seeds within 95%% of the oracle, worst ratio %.3f, %.0f s", worst, t)};
}

Verdict c5() {
  int identical = 0, sr_ok = 0, total = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    const JbasResult& a1 = n8(Algorithm::alg1, seed);
    const JbasResult& one = n8(Algorithm::pwee, seed, 1.0);
    const JbasResult& zero = n8(Algorithm::pwee, seed, 0.0);
    if (!one.usable() || !zero.usable()) continue;
    ++total;
    identical += same_trace(a1.trace, one.trace) && a1.ee == one.ee && a1.selection.mask == one.selection.mask;
    sr_ok += zero.sum_rate >= one.sum_rate;
    worst = std::min(worst, (zero.sum_rate - one.sum_rate) / one.sum_rate);
  }
  return {total > 0 && identical == total && sr_ok == total,
          std::to_string(identical) + "/" + std::to_string(total) + " kappa=1 runs identical to alg1, " +
              std::to_string(sr_ok) + "/" + std::to_string(total) +
              fmt(" seeds with SR(kappa=0) >= SR(kappa=1), worst relative margin %.2e", worst)};
}

Verdict c6() {
  int close = 0, total = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    const JbasResult& a1 = n8(Algorithm::alg1, seed);
    const JbasResult& a3 = n8(Algorithm::alg3, seed);
    if (!a1.usable()) continue;
    ++total;
    const double gap = a3.usable() ? std::abs(a3.ee - a1.ee) / a1.ee : 1.0;
    worst = std::max(worst, gap);
    close += gap <= 0.05;
  }
  return {total > 0 && close >= 0.8 * total,
          std::to_string(close) + "/" + std::to_string(total) + fmt(" seeds within 5%%, worst gap %.3f", worst)};
}

Verdict c7() {
  std::vector<double> ee1, ee0, active;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    const JbasResult& a = n16(Algorithm::alg1, seed);
    const JbasResult& b = n16(Algorithm::no_as, seed);
    if (!a.usable() || !b.usable()) continue;
    ee1.push_back(a.ee);
    ee0.push_back(b.ee);
    active.push_back(a.selection.active_count() / 2.0);
  }
  const double m1 = mean(ee1), m0 = mean(ee0), act = mean(active);
  return {!ee1.empty() && m1 > m0 && act < 16.0,
          fmt("mean EE %.3f vs %.3f Mbit/J over ", m1 / 1e6, m0 / 1e6) + std::to_string(ee1.size()) +
              fmt(" seeds, %.2f active antennas per BS", act)};
}

Verdict c8() {
  const double eps = SolveOptions{}.epsilon;
  std::vector<double> fractions;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    const JbasResult& r = n16(Algorithm::alg1, seed);
    if (!r.usable()) continue;
    const auto& a = r.selection.a;
    int frac = 0;
    for (int j = 0; j < a.size(); ++j) frac += a[j] > eps && a[j] < 1.0 - eps;
    fractions.push_back(static_cast<double>(frac) / static_cast<double>(a.size()));
  }
  const double m = mean(fractions);
  return {!fractions.empty() && m < 0.10, fmt("mean fractional share %.1f%% over ", 100 * m) +
                                              std::to_string(fractions.size()) + " seeds (bar 10%)"};
}

Verdict c9() {
  std::vector<double> f3, f1;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    const JbasResult& a = n8(Algorithm::alg2_f3, seed);
    const JbasResult& b = n8(Algorithm::alg2_f1, seed);
    if (!a.usable() || !b.usable()) continue;
    f3.push_back(a.ee);
    f1.push_back(b.ee);
  }
  const double m3 = mean(f3), m1 = mean(f1);
  return {!f3.empty() && m3 >= m1,
          fmt("mean EE f3 %.3f vs f1 %.3f Mbit/J over ", m3 / 1e6, m1 / 1e6) + std::to_string(f3.size()) + " seeds"};
}

Verdict c10() {
  int agree = 0, total = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SolveOptions o;
    o.rel_tol = 1e-7;
    o.max_iter = 200;
    const Scenario s = make(4, 5e6, seed);
    const JbasResult& a = runs.get("n4-socp", seed, s, [&](const Scenario& x) { return run_algorithm1(x, o); });
    o.backend_path = RatePath::generic;
    const JbasResult& b = runs.get("n4-generic", seed, s, [&](const Scenario& x) { return run_algorithm1(x, o); });
    if (a.status != RunStatus::converged || b.status != RunStatus::converged) continue;
    ++total;
    const double gap = std::abs(a.ee - b.ee) / a.ee;
    worst = std::max(worst, gap);
    agree += gap <= 1e-3;
  }
  return {total > 0 && agree == total,
          std::to_string(agree) + "/" + std::to_string(total) + fmt(" converged pairs within 1e-3, worst gap %.2e", worst)};
}

Verdict c11() {
  const auto cfg = experiment_config_from_json(nlohmann::json::parse(R"({
    "scenario": {"N": 4, "rate_target_bps": 5e6},
    "sweep": {"parameter": "algorithm", "values": ["alg1", "alg2-f3", "alg3"]},
    "seeds": {"count": 3, "base": 100},
    "threads": 0
  })"));
  auto bodies = [&] {
    const ExperimentResult r = run_experiment(cfg);
    std::ostringstream t, s, x;
    write_traces_csv(r, t);
    write_results_csv(r, x);
    write_summary_csv(r, s);
    return strip_timing_columns(t.str()) + strip_timing_columns(x.str()) + strip_timing_columns(s.str());
  };
  const std::string first = bodies();
  const std::string second = bodies();
  return {first == second, first == second ? std::to_string(first.size()) + " bytes identical across two runs"
                                           : std::string("CSV bodies differ")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"bound suite", c1},
      {"SCA monotonicity", c2},
      {"feasibility of outputs", c3},
      {"oracle equivalence", c4},
      {"PWEE endpoints", c5},
      {"scalarization cross-check", c6},
      {"JBAS benefit over no-AS", c7},
      {"near-Boolean relaxation", c8},
      {"sparsity ordering", c9},
      {"SOCP vs generic agreement", c10},
      {"determinism", c11},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  // criterion 3 inspects runs made by the others, so it is evaluated last
  std::vector<int> order;
  for (int i = 1; i <= static_cast<int>(criteria.size()); ++i)
    if (i != 3) order.push_back(i);
  order.push_back(3);
  int failed = 0;
  for (int i : order) {
    if (!only.empty() && !only.count(i)) continue;
    Verdict v;
    try {
      v = criteria[i - 1].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << "ACCEPTANCE " << i << ' ' << (v.pass ? "PASS" : "FAIL") << "  " << criteria[i - 1].first << ": "
              << v.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
