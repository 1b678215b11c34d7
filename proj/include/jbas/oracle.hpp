// SPDX-License-Identifier: Apache-2.0
//
// Independent checks of the optimization machinery: brute-force antenna
// subset search on tiny instances, randomized checks of the surrogate bounds,
// and activity of the SINR rows at converged points.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "jbas/algorithms.hpp"

namespace jbas {

/// Largest total antenna count the exhaustive search accepts.
inline constexpr int kOracleMaxAntennas = 12;

struct SubsetEntry {
  std::uint64_t bits = 0;  // bit j set: flat antenna j on
  bool feasible = false;
  double ee = 0.0;           // best over restarts, bits/J
  double ee_first = 0.0;     // first restart alone
  double sum_rate = 0.0;     // at the best restart, bits/s
  double power = 0.0;        // at the best restart, W
};

struct OracleReport {
  std::vector<bool> best_mask;
  double best_ee = 0.0;
  std::vector<SubsetEntry> table;
  int restarts = 0;

  /// result EE divided by the best subset EE.
  double ratio(const JbasResult& r) const { return best_ee > 0.0 ? r.ee / best_ee : 0.0; }
  const SubsetEntry* find(std::uint64_t bits) const;
};

std::vector<bool> mask_from_bits(std::uint64_t bits, int total);
std::uint64_t bits_from_mask(const std::vector<bool>& mask);

/// Every nonempty subset meeting the per-BS minimum counts, ascending bit order.
std::vector<std::uint64_t> admissible_subsets(const Scenario& s);

/// Beamforming-only optimization over every admissible subset with
/// `restarts` random initializations each (start indices 0..restarts-1, so
/// the first one matches run_no_as_baseline on the full set). Throws
/// ConfigError above kOracleMaxAntennas.
OracleReport exhaustive_antenna_search(const Scenario& s, const SolveOptions& opts, int restarts = 3);

void write_oracle_csv(const OracleReport& r, std::ostream& os);

struct BoundCheckReport {
  int samples = 0;
  int checks = 0;
  std::vector<std::string> failures;
  double max_value_gap = 0.0;     // worst one-sidedness or tightness violation seen
  double max_gradient_gap = 0.0;  // worst finite-difference mismatch seen

  bool passed() const { return failures.empty(); }
};

/// Global one-sidedness, tightness at the expansion point and first-order
/// tightness (central differences, step 1e-5) for Psi, Upsilon, Xi, Delta and
/// the f2/f3 majorants, `samples` random cases each.
BoundCheckReport check_bounds(int samples, std::uint64_t seed, double value_tol = 1e-10, double grad_tol = 1e-5);

struct ActivityReport {
  std::vector<int> worst_user;      // per group
  std::vector<double> relative_gap; // |gamma - SINR| / SINR for that user
  std::vector<int> inactive_groups;

  bool passed() const { return inactive_groups.empty(); }
};

/// Compares each group's worst-user gamma in the result with the SINR it
/// actually attains.
ActivityReport check_sinr_activity(const JbasResult& r, const Scenario& s, double rel_tol = 1e-5);

}  // namespace jbas
