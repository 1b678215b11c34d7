// SPDX-License-Identifier: Apache-2.0

#include "jbas/scenario_io.hpp"

#include <fstream>
#include <set>

namespace jbas {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

json power_model_to_json(const PowerModel& pm) {
  return json{{"eta", pm.eta},       {"p_rf", pm.p_rf},     {"p_sta", pm.p_sta},
              {"p_ue", pm.p_ue},     {"p_max", pm.p_max},   {"n0_dbw", pm.n0_dbw},
              {"bandwidth_hz", pm.bandwidth_hz}};
}

PowerModel power_model_from_json(const json& j, const PowerModel& defaults) {
  reject_unknown(j, {"eta", "p_rf", "p_sta", "p_ue", "p_max", "n0_dbw", "bandwidth_hz"}, "power");
  PowerModel pm = defaults;
  pm.eta = get_or(j, "eta", pm.eta);
  pm.p_rf = get_or(j, "p_rf", pm.p_rf);
  pm.p_sta = get_or(j, "p_sta", pm.p_sta);
  pm.p_ue = get_or(j, "p_ue", pm.p_ue);
  pm.p_max = get_or(j, "p_max", pm.p_max);
  pm.n0_dbw = get_or(j, "n0_dbw", pm.n0_dbw);
  pm.bandwidth_hz = get_or(j, "bandwidth_hz", pm.bandwidth_hz);
  pm.validate();
  return pm;
}

json scenario_to_json(const Scenario& s) {
  json groups = json::array();
  for (const auto& g : s.groups) groups.push_back({{"bs", g.bs}, {"users", g.users}});
  json channels = json::array();
  for (int b = 0; b < s.num_bs; ++b) {
    for (int k = 0; k < s.num_users(); ++k) {
      json row = json::array();
      for (int i = 0; i < s.channels[b][k].size(); ++i) {
        row.push_back(s.channels[b][k][i].real());
        row.push_back(s.channels[b][k][i].imag());
      }
      channels.push_back(std::move(row));
    }
  }
  return json{{"B", s.num_bs},
              {"N", s.antennas},
              {"seed", s.seed},
              {"groups", groups},
              {"rate_targets_bps", s.rate_targets_bps},
              {"power", power_model_to_json(s.power)},
              {"channels", channels}};
}

Scenario scenario_from_json(const json& j) {
  reject_unknown(j,
                 {"B", "N", "U", "L", "seed", "placement", "distance_m", "min_distance_m", "rate_target_bps",
                  "rate_targets_bps", "groups", "power", "channels"},
                 "scenario");
  const PowerModel pm = j.contains("power") ? power_model_from_json(j.at("power")) : PowerModel{};
  if (!j.contains("channels")) {
    ScenarioConfig cfg;
    cfg.num_bs = get_or(j, "B", cfg.num_bs);
    cfg.antennas_per_bs = get_or(j, "N", cfg.antennas_per_bs);
    cfg.groups_per_bs = get_or(j, "U", cfg.groups_per_bs);
    cfg.users_per_group = get_or(j, "L", cfg.users_per_group);
    cfg.distance_m = get_or(j, "distance_m", cfg.distance_m);
    cfg.min_distance_m = get_or(j, "min_distance_m", cfg.min_distance_m);
    cfg.rate_target_bps = get_or(j, "rate_target_bps", cfg.rate_target_bps);
    const auto placement = get_or<std::string>(j, "placement", "fixed");
    if (placement == "fixed") {
      cfg.placement = Placement::fixed;
    } else if (placement == "random") {
      cfg.placement = Placement::random;
    } else {
      throw ConfigError("placement must be 'fixed' or 'random'");
    }
    cfg.power = pm;
    return generate_scenario(cfg, get_or<std::uint64_t>(j, "seed", 0));
  }

  Scenario s;
  s.power = pm;
  s.num_bs = get_or(j, "B", 0);
  s.seed = get_or<std::uint64_t>(j, "seed", 0);
  const json& n = j.at("N");
  if (n.is_array()) {
    s.antennas = n.get<std::vector<int>>();
  } else {
    s.antennas.assign(s.num_bs, n.get<int>());
  }
  if (!j.contains("groups") || !j.contains("rate_targets_bps"))
    throw ConfigError("explicit-channel scenarios need 'groups' and 'rate_targets_bps'");
  for (const auto& g : j.at("groups")) {
    reject_unknown(g, {"bs", "users"}, "group");
    s.groups.push_back({g.at("bs").get<int>(), g.at("users").get<std::vector<int>>()});
  }
  s.rate_targets_bps = j.at("rate_targets_bps").get<std::vector<double>>();
  const int K = s.num_users();
  const json& ch = j.at("channels");
  if (!ch.is_array() || static_cast<int>(ch.size()) != s.num_bs * K)
    throw ConfigError("channels must have B*K rows");
  s.channels.assign(s.num_bs, {});
  for (int b = 0; b < s.num_bs; ++b) {
    for (int k = 0; k < K; ++k) {
      const auto row = ch.at(b * K + k).get<std::vector<double>>();
      if (static_cast<int>(row.size()) != 2 * s.antennas.at(b)) throw ConfigError("channel row has wrong length");
      Eigen::VectorXcd h(s.antennas[b]);
      for (int i = 0; i < s.antennas[b]; ++i) h[i] = {row[2 * i], row[2 * i + 1]};
      s.channels[b].push_back(h);
    }
  }
  s.validate();
  return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << scenario_to_json(s).dump(2) << "\n";
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  return scenario_from_json(j);
}

}  // namespace jbas
