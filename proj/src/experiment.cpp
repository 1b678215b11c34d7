// SPDX-License-Identifier: Apache-2.0

#include "jbas/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <Eigen/Core>

#include "jbas/scenario_io.hpp"

namespace jbas {

using nlohmann::json;

namespace {

const char* kVersion = "1.0.0";

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <typename T>
T read(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
T as(const json& v, const std::string& what) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad sweep value for '" + what + "': " + v.dump());
  }
}

const std::set<std::string> kSweepable = {"algorithm", "B",       "N",      "U",     "L",   "rate_target_bps",
                                          "distance_m", "chi",    "epsilon", "max_iter", "kappa", "varrho",
                                          "rho",        "varsigma"};

// Applies one named value to a scenario/options pair.
void apply(const std::string& name, const json& v, ScenarioConfig& sc, std::string& alg, SolveOptions& o) {
  if (name == "algorithm") alg = as<std::string>(v, name);
  else if (name == "B") sc.num_bs = as<int>(v, name);
  else if (name == "N") sc.antennas_per_bs = as<int>(v, name);
  else if (name == "U") sc.groups_per_bs = as<int>(v, name);
  else if (name == "L") sc.users_per_group = as<int>(v, name);
  else if (name == "rate_target_bps") sc.rate_target_bps = as<double>(v, name);
  else if (name == "distance_m") sc.distance_m = as<double>(v, name);
  else if (name == "chi") o.chi = as<double>(v, name);
  else if (name == "epsilon") o.epsilon = as<double>(v, name);
  else if (name == "max_iter") o.max_iter = as<int>(v, name);
  else if (name == "kappa") o.kappa = as<double>(v, name);
  else if (name == "varrho") o.varrho = as<double>(v, name);
  else if (name == "rho") o.rho = as<double>(v, name);
  else if (name == "varsigma") o.varsigma = as<double>(v, name);
  else throw ConfigError("parameter '" + name + "' cannot be swept");
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Scenario configuration checks that generate_scenario would otherwise hit per seed.
void check_scenario(const ScenarioConfig& sc) {
  if (sc.num_bs < 1 || sc.antennas_per_bs < 1 || sc.groups_per_bs < 1 || sc.users_per_group < 1)
    throw ConfigError("B, N, U and L must be positive");
  if (sc.antennas_per_bs < sc.groups_per_bs) throw ConfigError("N must be at least U");
  if (sc.rate_target_bps < 0.0) throw ConfigError("rate target must be nonnegative");
  if (!(sc.distance_m > 0.0)) throw ConfigError("distance must be positive");
  sc.power.validate();
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

std::string sweep_values_csv(const SweepPoint& p) {
  std::string out;
  for (const auto& [k, v] : p.values) {
    if (!out.empty()) out += ';';
    out += k + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
  }
  return out;
}

// First subproblem the selected driver would solve, for debugging dumps.
void dump_first_program(const Scenario& s, const SweepPoint& p, const std::string& path) {
  const InitResult init = initialize_feasible(s, p.options);
  if (!init.feasible) return;
  BuildOptions bo;
  bo.chi = p.options.chi;
  bo.kappa = p.algorithm == Algorithm::pwee ? p.options.kappa : 1.0;
  bo.rate_path = p.options.backend_path;
  bo.min_antennas = p.options.min_antennas;
  Subproblem sp;
  switch (p.algorithm) {
    case Algorithm::alg2_f1:
    case Algorithm::alg2_f2:
    case Algorithm::alg2_f3: {
      const SmoothingKind k = p.algorithm == Algorithm::alg2_f1   ? SmoothingKind::f1
                              : p.algorithm == Algorithm::alg2_f2 ? SmoothingKind::f2
                                                                  : SmoothingKind::f3;
      sp = build_sparsity_subproblem(s, init.point, k, p.options.rho, p.options.varsigma, bo);
      break;
    }
    case Algorithm::alg3: {
      ExpansionPoint ep = init.point;
      double total = 0.0, tx = 0.0;
      for (double r : group_rates_nats(ep.w, s)) total += r;
      for (const auto& wg : ep.w.w) tx += wg.squaredNorm();
      ep.r = std::sqrt(total);
      ep.x = total / (tx / s.power.eta + s.power.p_rf * s.total_antennas() + s.p0());
      if (!(ep.r > 0.0)) return;
      sp = build_scalarization_subproblem(s, ep, p.options.varrho, minimum_power(s), bo);
      break;
    }
    case Algorithm::no_as:
      bo.mask.assign(s.total_antennas(), true);
      sp = build_cc_subproblem(s, init.point, bo);
      break;
    default:
      sp = build_cc_subproblem(s, init.point, bo);
  }
  std::ofstream f(path);
  conic::dump_triplets(sp.program, f);
}

}  // namespace

json ExperimentConfig::to_json() const {
  json sw = json::array();
  for (const auto& a : sweep) sw.push_back({{"parameter", a.parameter}, {"values", a.values}});
  if (!points.empty()) sw = json{{"points", points}};
  return json{{"scenario",
               {{"B", scenario.num_bs},
                {"N", scenario.antennas_per_bs},
                {"U", scenario.groups_per_bs},
                {"L", scenario.users_per_group},
                {"placement", scenario.placement == Placement::fixed ? "fixed" : "random"},
                {"distance_m", scenario.distance_m},
                {"min_distance_m", scenario.min_distance_m},
                {"rate_target_bps", scenario.rate_target_bps},
                {"sigma_e2", sigma_e2},
                {"power", power_model_to_json(scenario.power)}}},
              {"algorithm",
               {{"name", algorithm},
                {"chi", options.chi},
                {"epsilon", options.epsilon},
                {"max_iter", options.max_iter},
                {"rel_tol", options.rel_tol},
                {"solver_tol", options.solver_tol},
                {"backend", to_string(options.backend_path)},
                {"min_antennas", options.min_antennas},
                {"kappa", options.kappa},
                {"varrho", options.varrho},
                {"rho", options.rho},
                {"varsigma", options.varsigma}}},
              {"sweep", sw},
              {"seeds", seeds},
              {"threads", threads}};
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("seed list is empty");
  if (threads < 0) throw ConfigError("threads must be nonnegative");
  if (sigma_e2 < 0.0) throw ConfigError("sigma_e2 must be nonnegative");
  std::set<std::string> seen;
  for (const auto& a : sweep) {
    if (!kSweepable.count(a.parameter)) throw ConfigError("sweep parameter '" + a.parameter + "' does not exist");
    if (!seen.insert(a.parameter).second) throw ConfigError("sweep parameter '" + a.parameter + "' repeated");
    if (a.values.empty()) throw ConfigError("sweep over '" + a.parameter + "' has no values");
  }
  if (!points.empty() && !sweep.empty()) throw ConfigError("sweep axes and explicit points cannot be combined");
  for (const json& p : points) {
    if (!p.is_object() || p.empty()) throw ConfigError("each sweep point must be a nonempty object");
    for (auto it = p.begin(); it != p.end(); ++it)
      if (!kSweepable.count(it.key())) throw ConfigError("sweep parameter '" + it.key() + "' does not exist");
  }
  for (const SweepPoint& p : expand_sweep(*this)) {
    check_scenario(p.scenario);
    p.options.validate();
  }
}

ExperimentConfig experiment_config_from_json(const json& j) {
  reject_unknown(j, {"scenario", "algorithm", "sweep", "seeds", "threads"}, "config");
  ExperimentConfig cfg;
  if (j.contains("scenario")) {
    const json& s = j.at("scenario");
    reject_unknown(s,
                   {"B", "N", "U", "L", "placement", "distance_m", "min_distance_m", "rate_target_bps", "sigma_e2",
                    "power"},
                   "scenario");
    auto& sc = cfg.scenario;
    sc.num_bs = read(s, "B", sc.num_bs);
    sc.antennas_per_bs = read(s, "N", sc.antennas_per_bs);
    sc.groups_per_bs = read(s, "U", sc.groups_per_bs);
    sc.users_per_group = read(s, "L", sc.users_per_group);
    sc.distance_m = read(s, "distance_m", sc.distance_m);
    sc.min_distance_m = read(s, "min_distance_m", sc.min_distance_m);
    sc.rate_target_bps = read(s, "rate_target_bps", sc.rate_target_bps);
    cfg.sigma_e2 = read(s, "sigma_e2", 0.0);
    const auto placement = read<std::string>(s, "placement", "fixed");
    if (placement == "fixed") sc.placement = Placement::fixed;
    else if (placement == "random") sc.placement = Placement::random;
    else throw ConfigError("placement must be 'fixed' or 'random'");
    if (s.contains("power")) sc.power = power_model_from_json(s.at("power"));
  }
  if (j.contains("algorithm")) {
    const json& a = j.at("algorithm");
    reject_unknown(a,
                   {"name", "chi", "epsilon", "max_iter", "rel_tol", "solver_tol", "backend", "min_antennas", "kappa",
                    "varrho", "rho", "varsigma"},
                   "algorithm");
    auto& o = cfg.options;
    cfg.algorithm = read<std::string>(a, "name", cfg.algorithm);
    o.chi = read(a, "chi", o.chi);
    o.epsilon = read(a, "epsilon", o.epsilon);
    o.max_iter = read(a, "max_iter", o.max_iter);
    o.rel_tol = read(a, "rel_tol", o.rel_tol);
    o.solver_tol = read(a, "solver_tol", o.solver_tol);
    o.backend_path = rate_path_from_string(read<std::string>(a, "backend", "socp"));
    o.min_antennas = read(a, "min_antennas", o.min_antennas);
    o.kappa = read(a, "kappa", o.kappa);
    o.varrho = read(a, "varrho", o.varrho);
    o.rho = read(a, "rho", o.rho);
    o.varsigma = read(a, "varsigma", o.varsigma);
  }
  algorithm_from_string(cfg.algorithm);
  if (j.contains("sweep")) {
    json sw = j.at("sweep");
    if (sw.is_object() && sw.contains("points")) {
      reject_unknown(sw, {"points"}, "sweep");
      if (!sw.at("points").is_array() || sw.at("points").empty())
        throw ConfigError("sweep points must be a nonempty array");
      for (const auto& p : sw.at("points")) cfg.points.push_back(p);
      sw = json::array();
    }
    if (sw.is_object()) sw = json::array({sw});
    if (!sw.is_array()) throw ConfigError("sweep must be an object or an array of objects");
    for (const auto& axis : sw) {
      reject_unknown(axis, {"parameter", "values"}, "sweep");
      SweepAxis a;
      a.parameter = read<std::string>(axis, "parameter", "");
      if (!axis.contains("values") || !axis.at("values").is_array()) throw ConfigError("sweep needs a values array");
      for (const auto& v : axis.at("values")) a.values.push_back(v);
      cfg.sweep.push_back(std::move(a));
    }
  }
  if (j.contains("seeds")) {
    const json& s = j.at("seeds");
    if (s.is_array()) {
      for (const auto& v : s) {
        if (!v.is_number_unsigned()) throw ConfigError("seeds must be nonnegative integers");
        cfg.seeds.push_back(v.get<std::uint64_t>());
      }
    } else {
      reject_unknown(s, {"count", "base"}, "seeds");
      const int count = read(s, "count", 20);
      const auto base = read<std::uint64_t>(s, "base", 0);
      if (count < 0) throw ConfigError("seed count must be nonnegative");
      for (int i = 0; i < count; ++i) cfg.seeds.push_back(base + static_cast<std::uint64_t>(i));
    }
  } else {
    for (std::uint64_t i = 0; i < 20; ++i) cfg.seeds.push_back(i);
  }
  cfg.threads = read(j, "threads", 0);
  cfg.validate();
  return cfg;
}

json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : cfg.to_json().dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string SweepPoint::label() const {
  std::string out;
  for (const auto& [k, v] : values) {
    if (!out.empty()) out += ';';
    out += k + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
  }
  return out.empty() ? "base" : out;
}

std::vector<SweepPoint> expand_sweep(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> points;
  for (const json& values : cfg.points) {
    SweepPoint p;
    p.index = static_cast<int>(points.size());
    p.scenario = cfg.scenario;
    p.options = cfg.options;
    std::string alg = cfg.algorithm;
    for (auto it = values.begin(); it != values.end(); ++it) {
      p.values.emplace_back(it.key(), it.value());
      apply(it.key(), it.value(), p.scenario, alg, p.options);
    }
    p.algorithm = algorithm_from_string(alg);
    points.push_back(std::move(p));
  }
  if (!cfg.points.empty()) return points;
  std::vector<std::size_t> idx(cfg.sweep.size(), 0);
  while (true) {
    SweepPoint p;
    p.index = static_cast<int>(points.size());
    p.scenario = cfg.scenario;
    p.options = cfg.options;
    std::string alg = cfg.algorithm;
    for (std::size_t a = 0; a < cfg.sweep.size(); ++a) {
      const json& v = cfg.sweep[a].values[idx[a]];
      p.values.emplace_back(cfg.sweep[a].parameter, v);
      apply(cfg.sweep[a].parameter, v, p.scenario, alg, p.options);
    }
    p.algorithm = algorithm_from_string(alg);
    points.push_back(std::move(p));
    // odometer, last axis fastest
    int a = static_cast<int>(cfg.sweep.size()) - 1;
    for (; a >= 0; --a) {
      if (++idx[a] < cfg.sweep[a].values.size()) break;
      idx[a] = 0;
    }
    if (a < 0) break;
  }
  return points;
}

int ExperimentResult::exit_code() const {
  if (failures > 0) return 4;
  if (infeasible > 0) return 3;
  return 0;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& dump_dir) {
  cfg.validate();
  ExperimentResult out;
  out.points = expand_sweep(cfg);
  const std::size_t n_seeds = cfg.seeds.size();
  out.runs.resize(out.points.size() * n_seeds);
  if (!dump_dir.empty()) std::filesystem::create_directories(dump_dir);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < out.runs.size(); i = next++) {
      const SweepPoint& p = out.points[i / n_seeds];
      RunRecord& rec = out.runs[i];
      rec.point = p.index;
      rec.seed = cfg.seeds[i % n_seeds];
      try {
        const Scenario truth = generate_scenario(p.scenario, rec.seed);
        const Scenario est = cfg.sigma_e2 > 0.0 ? perturb_channels(truth, cfg.sigma_e2, rec.seed) : truth;
        if (!dump_dir.empty())
          dump_first_program(est, p,
                             dump_dir + "/program_p" + std::to_string(p.index) + "_s" + std::to_string(rec.seed) +
                                 ".txt");
        rec.result = run_algorithm(p.algorithm, est, p.options);
        if (cfg.sigma_e2 > 0.0 && rec.result.usable()) {
          rec.result.sum_rate = sum_rate(rec.result.w, truth);
          rec.result.ee = energy_efficiency(rec.result.w, rec.result.selection, truth);
          rec.result.group_rates = group_rates(rec.result.w, truth);
        }
      } catch (const std::exception& e) {
        rec.error = e.what();
        rec.result.status = RunStatus::solver_failure;
      }
    }
  };
  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(out.runs.size(), 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& r : out.runs) {
    if (r.result.status == RunStatus::infeasible) ++out.infeasible;
    if (r.result.status == RunStatus::solver_failure) ++out.failures;
  }
  return out;
}

std::vector<AggregateRow> aggregate(const ExperimentResult& r) {
  std::vector<AggregateRow> rows;
  for (const SweepPoint& p : r.points) {
    AggregateRow row;
    row.point = p.index;
    row.label = p.label();
    row.algorithm = to_string(p.algorithm);
    std::vector<double> ee, sr, act;
    int infeasible = 0, failed = 0;
    for (const RunRecord& run : r.runs) {
      if (run.point != p.index) continue;
      ++row.total;
      if (run.result.status == RunStatus::infeasible) ++infeasible;
      if (run.result.status == RunStatus::solver_failure) ++failed;
      if (!run.result.usable()) continue;
      ee.push_back(run.result.ee);
      sr.push_back(run.result.sum_rate);
      act.push_back(run.result.selection.active_count());
    }
    row.used = static_cast<int>(ee.size());
    row.mean_ee = mean(ee);
    row.stderr_ee = stderr_of(ee);
    row.mean_sum_rate = mean(sr);
    row.stderr_sum_rate = stderr_of(sr);
    row.mean_active = mean(act);
    row.stderr_active = stderr_of(act);
    if (infeasible + failed > 0)
      row.note = "excluded " + std::to_string(infeasible) + " infeasible and " + std::to_string(failed) +
                 " failed seeds";
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_traces_csv(const ExperimentResult& r, std::ostream& os) {
  os << "point,seed,iter,phase,objective,ee_bits_per_joule,sum_rate_bps,power_w,active_antennas,solve_ms\n";
  for (const RunRecord& run : r.runs)
    for (const TraceRecord& t : run.result.trace.records)
      os << run.point << ',' << run.seed << ',' << t.iter << ',' << t.phase << ',' << num(t.objective) << ','
         << num(t.ee_bits_per_joule) << ',' << num(t.sum_rate_bps) << ',' << num(t.power_w) << ','
         << num(t.active_antennas) << ',' << num(t.solve_ms) << '\n';
}

void write_results_csv(const ExperimentResult& r, std::ostream& os) {
  os << "point,sweep,algorithm,seed,status,ee_bits_per_joule,sum_rate_bps,power_w,active_antennas,iterations,"
        "note,solve_ms\n";
  for (const RunRecord& run : r.runs) {
    const SweepPoint& p = r.points[run.point];
    const JbasResult& res = run.result;
    double ms = 0.0;
    for (const auto& t : res.trace.records) ms += t.solve_ms;
    const double power = res.ee > 0.0 ? res.sum_rate / res.ee : 0.0;
    std::string note = run.error.empty() ? res.note : run.error;
    std::replace(note.begin(), note.end(), ',', ';');
    os << run.point << ',' << sweep_values_csv(p) << ',' << to_string(p.algorithm) << ',' << run.seed << ','
       << to_string(res.status) << ',' << num(res.ee) << ',' << num(res.sum_rate) << ',' << num(power) << ','
       << res.selection.active_count() << ',' << res.trace.records.size() << ',' << note << ',' << num(ms) << '\n';
  }
}

void write_summary_csv(const ExperimentResult& r, std::ostream& os) {
  os << "point,sweep,algorithm,seeds,used,mean_ee_bits_per_joule,stderr_ee_bits_per_joule,mean_sum_rate_bps,"
        "stderr_sum_rate_bps,mean_active_antennas,stderr_active_antennas,note\n";
  for (const AggregateRow& a : aggregate(r))
    os << a.point << ',' << sweep_values_csv(r.points[a.point]) << ',' << a.algorithm << ',' << a.total << ','
       << a.used << ',' << num(a.mean_ee) << ',' << num(a.stderr_ee) << ',' << num(a.mean_sum_rate) << ','
       << num(a.stderr_sum_rate) << ',' << num(a.mean_active) << ',' << num(a.stderr_active) << ',' << a.note
       << '\n';
}

void write_tradeoff_csv(const ExperimentResult& r, std::ostream& os) {
  struct Row {
    std::string curve, control;
    double value, ee, sr, active;
  };
  std::vector<Row> rows;
  const auto agg = aggregate(r);
  for (const SweepPoint& p : r.points)
    for (const auto& [k, v] : p.values)
      if (v.is_number() && ((k == "kappa" && p.algorithm == Algorithm::pwee) ||
                            (k == "varrho" && p.algorithm == Algorithm::alg3))) {
        const AggregateRow& a = agg[p.index];
        std::string curve = to_string(p.algorithm);
        for (const auto& [k2, v2] : p.values)
          if (k2 != k && k2 != "algorithm") curve += ";" + k2 + "=" + (v2.is_string() ? v2.get<std::string>() : v2.dump());
        rows.push_back({curve, k, v.get<double>(), a.mean_ee, a.mean_sum_rate, a.mean_active});
      }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.control != b.control) return a.control < b.control;
    if (a.curve != b.curve) return a.curve < b.curve;
    return a.value < b.value;
  });
  os << "curve,control,value,mean_ee_bits_per_joule,mean_sum_rate_bps,mean_active_antennas\n";
  for (const Row& row : rows)
    os << row.curve << ',' << row.control << ',' << num(row.value) << ',' << num(row.ee) << ',' << num(row.sr) << ','
       << num(row.active) << '\n';
}

std::string strip_timing_columns(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  std::vector<bool> keep;
  bool header = true;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (std::size_t pos; (pos = line.find(',', start)) != std::string::npos; start = pos + 1)
      cells.push_back(line.substr(start, pos - start));
    cells.push_back(line.substr(start));
    if (header) {
      for (const auto& h : cells) keep.push_back(!(h.size() >= 3 && h.compare(h.size() - 3, 3, "_ms") == 0));
      header = false;
    }
    std::string row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i < keep.size() && !keep[i]) continue;
      if (!row.empty() || i > 0) row += ',';
      row += cells[i];
    }
    out += row + '\n';
  }
  return out;
}

json manifest(const ExperimentConfig& cfg, const ExperimentResult& r) {
  json excluded = json::array();
  for (const RunRecord& run : r.runs)
    if (!run.result.usable())
      excluded.push_back({{"point", run.point},
                          {"seed", run.seed},
                          {"status", to_string(run.result.status)},
                          {"note", run.error.empty() ? run.result.note : run.error}});
  return json{{"tool", "jbas"},
              {"version", kVersion},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
              {"config", cfg.to_json()},
              {"config_hash", config_hash(cfg)},
              {"seed_count", cfg.seeds.size()},
              {"sweep_points", r.points.size()},
              {"runs", r.runs.size()},
              {"infeasible", r.infeasible},
              {"solver_failures", r.failures},
              {"excluded", excluded},
              {"exit_code", r.exit_code()},
              {"files", {"traces.csv", "results.csv", "summary.csv", "tradeoff.csv"}}};
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir + "/" + name);
    if (!f) throw ConfigError("cannot write " + dir + "/" + name);
    return f;
  };
  {
    auto f = open("traces.csv");
    write_traces_csv(r, f);
  }
  {
    auto f = open("results.csv");
    write_results_csv(r, f);
  }
  {
    auto f = open("summary.csv");
    write_summary_csv(r, f);
  }
  {
    auto f = open("tradeoff.csv");
    write_tradeoff_csv(r, f);
  }
  auto f = open("manifest.json");
  f << manifest(cfg, r).dump(2) << '\n';
}

}  // namespace jbas
