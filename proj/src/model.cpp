// SPDX-License-Identifier: Apache-2.0

#include "jbas/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace jbas {

double PowerModel::noise_linear() const { return std::pow(10.0, n0_dbw / 10.0); }

void PowerModel::validate() const {
  if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("power.eta must lie in (0,1]");
  if (!(p_rf >= 0.0)) throw ConfigError("power.p_rf must be nonnegative");
  if (!(p_sta > 0.0)) throw ConfigError("power.p_sta must be positive");
  if (!(p_ue > 0.0)) throw ConfigError("power.p_ue must be positive");
  if (!(p_max > 0.0)) throw ConfigError("power.p_max must be positive");
  if (!(bandwidth_hz > 0.0)) throw ConfigError("power.bandwidth_hz must be positive");
  if (!std::isfinite(n0_dbw)) throw ConfigError("power.n0_dbw must be finite");
}

int Scenario::total_antennas() const { return std::accumulate(antennas.begin(), antennas.end(), 0); }

int Scenario::antenna_offset(int b) const {
  return std::accumulate(antennas.begin(), antennas.begin() + b, 0);
}

std::vector<int> Scenario::groups_of_bs(int b) const {
  std::vector<int> out;
  for (int g = 0; g < num_groups(); ++g)
    if (groups[g].bs == b) out.push_back(g);
  return out;
}

int Scenario::group_of_user(int k) const {
  for (int g = 0; g < num_groups(); ++g)
    for (int u : groups[g].users)
      if (u == k) return g;
  return -1;
}

double Scenario::group_target_nats(int g) const {
  double best = 0.0;
  for (int k : groups[g].users) best = std::max(best, rate_targets_bps[k]);
  return bps_to_nats(best, power);
}

void Scenario::validate() const {
  power.validate();
  if (num_bs < 1) throw ConfigError("scenario needs at least one BS");
  if (static_cast<int>(antennas.size()) != num_bs) throw ConfigError("antenna count list must have one entry per BS");
  for (int n : antennas)
    if (n < 1) throw ConfigError("every BS needs at least one antenna");
  if (groups.empty()) throw ConfigError("scenario has no groups");
  const int K = num_users();
  std::vector<int> seen(K, 0);
  for (const auto& grp : groups) {
    if (grp.bs < 0 || grp.bs >= num_bs) throw ConfigError("group served by an unknown BS");
    if (grp.users.empty()) throw ConfigError("empty multicast group");
    for (int k : grp.users) {
      if (k < 0 || k >= K) throw ConfigError("group member index out of range");
      if (seen[k]++) throw ConfigError("user belongs to more than one group");
    }
  }
  for (int k = 0; k < K; ++k)
    if (!seen[k]) throw ConfigError("user " + std::to_string(k) + " is not in any group");
  if (static_cast<int>(channels.size()) != num_bs) throw ConfigError("channel table must have one row per BS");
  for (int b = 0; b < num_bs; ++b) {
    if (static_cast<int>(channels[b].size()) != K) throw ConfigError("channel table must have one entry per user");
    for (const auto& h : channels[b]) {
      if (h.size() != antennas[b]) throw ConfigError("channel length differs from the BS antenna count");
      if (!h.allFinite()) throw ConfigError("non-finite channel coefficient");
    }
  }
  for (double r : rate_targets_bps)
    if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("rate targets must be finite and nonnegative");
}

double path_loss_db(double distance_m) { return 30.0 * std::log10(distance_m) + 35.0; }

namespace {

Eigen::VectorXcd draw_cn(std::mt19937_64& rng, int n, double variance) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  Eigen::VectorXcd h(n);
  for (int i = 0; i < n; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    h[i] = {re, im};
  }
  return h;
}

}  // namespace

Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  if (config.num_bs < 1) throw ConfigError("B must be at least 1");
  if (config.groups_per_bs < 1 || config.users_per_group < 1) throw ConfigError("U and L must be at least 1");
  if (config.antennas_per_bs < config.groups_per_bs)
    throw ConfigError("N must be at least U so every BS can carry its streams");
  if (!(config.distance_m > 0.0)) throw ConfigError("distance must be positive");
  if (config.placement == Placement::random &&
      !(config.min_distance_m > 0.0 && config.min_distance_m < config.distance_m))
    throw ConfigError("random placement needs 0 < min_distance < distance");
  if (!(config.rate_target_bps >= 0.0)) throw ConfigError("rate target must be nonnegative");
  config.power.validate();

  Scenario s;
  s.num_bs = config.num_bs;
  s.antennas.assign(config.num_bs, config.antennas_per_bs);
  s.power = config.power;
  s.seed = seed;

  const int K = config.num_bs * config.groups_per_bs * config.users_per_group;
  s.rate_targets_bps.assign(K, config.rate_target_bps);

  std::mt19937_64 rng(seed);

  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  int next = 0;
  for (int b = 0; b < config.num_bs; ++b) {
    for (int u = 0; u < config.groups_per_bs; ++u) {
      Group grp;
      grp.bs = b;
      for (int l = 0; l < config.users_per_group; ++l) grp.users.push_back(order[next++]);
      std::sort(grp.users.begin(), grp.users.end());
      s.groups.push_back(std::move(grp));
    }
  }

  // dist[b][k]
  std::vector<std::vector<double>> dist(config.num_bs, std::vector<double>(K, config.distance_m));
  if (config.placement == Placement::random) {
    // Users dropped on the segment between BS 0 and BS 1 (spacing 2d); any further BS sits at d.
    std::uniform_real_distribution<double> pos(config.min_distance_m, 2.0 * config.distance_m - config.min_distance_m);
    for (int k = 0; k < K; ++k) {
      const double x = pos(rng);
      dist[0][k] = x;
      if (config.num_bs > 1) dist[1][k] = 2.0 * config.distance_m - x;
    }
  }

  s.channels.resize(config.num_bs);
  for (int b = 0; b < config.num_bs; ++b) {
    for (int k = 0; k < K; ++k) {
      const double attenuation = std::pow(10.0, -path_loss_db(dist[b][k]) / 10.0);
      s.channels[b].push_back(draw_cn(rng, config.antennas_per_bs, 1.0) * std::sqrt(attenuation));
    }
  }
  s.validate();
  return s;
}

Scenario perturb_channels(const Scenario& s, double sigma_e2, std::uint64_t seed) {
  if (!(sigma_e2 >= 0.0) || !std::isfinite(sigma_e2)) throw ConfigError("channel error variance must be nonnegative");
  Scenario out = s;
  if (sigma_e2 == 0.0) return out;
  std::mt19937_64 rng(seed);
  for (auto& row : out.channels)
    for (auto& h : row) h += draw_cn(rng, static_cast<int>(h.size()), sigma_e2);
  return out;
}

BeamformerSet BeamformerSet::zeros(const Scenario& s) {
  BeamformerSet out;
  for (const auto& grp : s.groups) out.w.push_back(Eigen::VectorXcd::Zero(s.antennas[grp.bs]));
  return out;
}

Eigen::VectorXcd BeamformerSet::antenna_row(const Scenario& s, int b, int i) const {
  const auto gs = s.groups_of_bs(b);
  Eigen::VectorXcd row(gs.size());
  for (std::size_t j = 0; j < gs.size(); ++j) row[j] = w[gs[j]][i];
  return row;
}

double BeamformerSet::antenna_power(const Scenario& s, int b, int i) const {
  double p = 0.0;
  for (int g = 0; g < s.num_groups(); ++g)
    if (s.groups[g].bs == b) p += std::norm(w[g][i]);
  return p;
}

bool BeamformerSet::all_finite() const {
  return std::all_of(w.begin(), w.end(), [](const Eigen::VectorXcd& v) { return v.allFinite(); });
}

SelectionState SelectionState::all_on(const Scenario& s) {
  SelectionState st;
  const int n = s.total_antennas();
  st.a = Eigen::VectorXd::Ones(n);
  st.v = Eigen::VectorXd::Constant(n, s.power.p_max);
  st.mask.assign(n, true);
  return st;
}

int SelectionState::active_count() const {
  return static_cast<int>(std::count(mask.begin(), mask.end(), true));
}

double interference_plus_noise(const BeamformerSet& w, const Scenario& s, int user) {
  const int g = s.group_of_user(user);
  double acc = s.power.noise_linear();
  for (int u = 0; u < s.num_groups(); ++u) {
    if (u == g) continue;
    acc += std::norm(s.channels[s.groups[u].bs][user].dot(w.w[u]));
  }
  return acc;
}

double sinr(const BeamformerSet& w, const Scenario& s, int user) {
  const int g = s.group_of_user(user);
  // Eigen's dot conjugates the first argument: h^H w.
  const double signal = std::norm(s.channels[s.groups[g].bs][user].dot(w.w[g]));
  return signal / interference_plus_noise(w, s, user);
}

std::vector<double> group_rates_nats(const BeamformerSet& w, const Scenario& s) {
  std::vector<double> out;
  for (const auto& grp : s.groups) {
    double worst = std::numeric_limits<double>::infinity();
    for (int k : grp.users) worst = std::min(worst, std::log1p(sinr(w, s, k)));
    out.push_back(worst);
  }
  return out;
}

double nats_to_bps(double nats, const PowerModel& pm) { return nats * pm.bandwidth_hz / std::log(2.0); }
double bps_to_nats(double bps, const PowerModel& pm) { return bps * std::log(2.0) / pm.bandwidth_hz; }

std::vector<double> group_rates(const BeamformerSet& w, const Scenario& s) {
  auto r = group_rates_nats(w, s);
  for (double& x : r) x = nats_to_bps(x, s.power);
  return r;
}

double sum_rate(const BeamformerSet& w, const Scenario& s) {
  const auto r = group_rates(w, s);
  return std::accumulate(r.begin(), r.end(), 0.0);
}

double total_power(const BeamformerSet& w, const SelectionState& state, const Scenario& s) {
  double tx = 0.0;
  for (const auto& wg : w.w) tx += wg.squaredNorm();
  return tx / s.power.eta + s.power.p_rf * state.active_count() + s.p0();
}

double energy_efficiency(const BeamformerSet& w, const SelectionState& state, const Scenario& s) {
  return sum_rate(w, s) / total_power(w, state, s);
}

std::vector<int> min_active_antennas(const Scenario& s) {
  std::vector<int> x(s.num_bs, 0);
  for (const auto& grp : s.groups) {
    const bool needs_stream = std::any_of(grp.users.begin(), grp.users.end(),
                                          [&](int k) { return s.rate_targets_bps[k] > 0.0; });
    if (needs_stream) ++x[grp.bs];
  }
  return x;
}

}  // namespace jbas
