// SPDX-License-Identifier: Apache-2.0
//
// Network scenarios for multi-cell multigroup multicast MISO downlinks and
// the analytic performance metrics (SINR, rates, power, energy efficiency).

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace jbas {

/// Raised for any invalid scenario or experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PowerModel {
  double eta = 0.35;            // PA efficiency in (0,1]
  double p_rf = 0.4;            // W per active RF chain
  double p_sta = 4.5;           // W per BS
  double p_ue = 0.1;            // W per user
  double p_max = 1.0;           // W per antenna
  double n0_dbw = -125.0;       // noise power over the band
  double bandwidth_hz = 20e6;

  double noise_linear() const;
  void validate() const;
};

struct Group {
  int bs = 0;
  std::vector<int> users;
};

/// One network instance. Immutable once built; all metrics are pure functions of it.
struct Scenario {
  int num_bs = 0;
  std::vector<int> antennas;                            // N_b per BS
  std::vector<Group> groups;
  std::vector<std::vector<Eigen::VectorXcd>> channels;  // [b][k], length N_b
  std::vector<double> rate_targets_bps;                 // per user
  PowerModel power;
  std::uint64_t seed = 0;

  int num_users() const { return static_cast<int>(rate_targets_bps.size()); }
  int num_groups() const { return static_cast<int>(groups.size()); }
  int total_antennas() const;
  int antenna_offset(int b) const;
  std::vector<int> groups_of_bs(int b) const;
  int group_of_user(int k) const;
  /// P_0 = B P_sta + K P_UE, always derived.
  double p0() const { return num_bs * power.p_sta + num_users() * power.p_ue; }
  /// Largest member target of a group, converted to nats per channel use.
  double group_target_nats(int g) const;

  /// Throws ConfigError when structural invariants fail.
  void validate() const;
};

enum class Placement { fixed, random };

struct ScenarioConfig {
  int num_bs = 2;
  int antennas_per_bs = 16;
  int groups_per_bs = 2;   // U
  int users_per_group = 2; // L
  Placement placement = Placement::fixed;
  double distance_m = 250.0;     // fixed: every BS-user distance; random: half the BS spacing
  double min_distance_m = 35.0;  // random placement keeps users this far from either BS
  double rate_target_bps = 20e6;
  PowerModel power;
};

/// Dimensionless path-loss attenuation in dB, 30 log10(d) + 35.
double path_loss_db(double distance_m);

Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

/// Adds i.i.d. CN(0, sigma_e2) estimation noise to every channel entry.
Scenario perturb_channels(const Scenario& s, double sigma_e2, std::uint64_t seed);

struct BeamformerSet {
  std::vector<Eigen::VectorXcd> w;  // one vector per group, length N_{b_g}

  static BeamformerSet zeros(const Scenario& s);
  /// Coefficients of antenna i at BS b across the groups served by b.
  Eigen::VectorXcd antenna_row(const Scenario& s, int b, int i) const;
  double antenna_power(const Scenario& s, int b, int i) const;
  bool all_finite() const;
};

/// Antenna selection side of the decision. Indexed by the flat antenna index
/// Scenario::antenna_offset(b) + i.
struct SelectionState {
  Eigen::VectorXd a;
  Eigen::VectorXd v;
  std::vector<bool> mask;

  static SelectionState all_on(const Scenario& s);
  int active_count() const;
};

double sinr(const BeamformerSet& w, const Scenario& s, int user);
/// |h_{b_u,k}^H w_u|^2 summed over all groups u != g(k), plus noise. Watts.
double interference_plus_noise(const BeamformerSet& w, const Scenario& s, int user);

std::vector<double> group_rates(const BeamformerSet& w, const Scenario& s);  // bits/s
double sum_rate(const BeamformerSet& w, const Scenario& s);                  // bits/s
/// min_k ln(1 + SINR_k) per group, i.e. the internal nats-per-channel-use rate.
std::vector<double> group_rates_nats(const BeamformerSet& w, const Scenario& s);

double nats_to_bps(double nats, const PowerModel& pm);
double bps_to_nats(double bps, const PowerModel& pm);

double total_power(const BeamformerSet& w, const SelectionState& state, const Scenario& s);
double energy_efficiency(const BeamformerSet& w, const SelectionState& state, const Scenario& s);

/// X_b: groups of BS b that contain a user with a positive target.
std::vector<int> min_active_antennas(const Scenario& s);

}  // namespace jbas
