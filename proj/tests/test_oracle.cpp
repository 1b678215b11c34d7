// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "jbas/oracle.hpp"

using namespace jbas;

namespace {

Scenario tiny(int b, int n, std::uint64_t seed, double rate = 0.0) {
  ScenarioConfig c;
  c.num_bs = b;
  c.antennas_per_bs = n;
  c.groups_per_bs = 1;
  c.users_per_group = 1;
  c.rate_target_bps = rate;
  return generate_scenario(c, seed);
}

}  // namespace

TEST_CASE("bit masks round-trip") {
  const auto m = mask_from_bits(0b1011, 5);
  CHECK(m == std::vector<bool>{true, true, false, true, false});
  CHECK(bits_from_mask(m) == 0b1011);
}

TEST_CASE("single BS with three antennas has seven admissible subsets") {
  CHECK(admissible_subsets(tiny(1, 3, 1)).size() == 7);
  // two BSs with a target each need one antenna per BS: 7 * 7
  CHECK(admissible_subsets(tiny(2, 3, 1, 1e6)).size() == 49);
  CHECK(admissible_subsets(tiny(2, 3, 1)).size() == 63);
}

TEST_CASE("search refuses instances above the antenna cap") {
  CHECK_THROWS_AS(exhaustive_antenna_search(tiny(2, 7, 1), {}), ConfigError);
}

TEST_CASE("oracle table is complete and its best entry is the maximum") {
  const Scenario s = tiny(1, 3, 2);
  const OracleReport rep = exhaustive_antenna_search(s, {});
  REQUIRE(rep.table.size() == 7);
  double best = 0.0;
  for (const auto& e : rep.table) {
    CHECK(e.feasible);
    CHECK(e.ee >= e.ee_first);
    best = std::max(best, e.ee);
  }
  CHECK(rep.best_ee == best);
  CHECK(rep.find(bits_from_mask(rep.best_mask))->ee == best);
  std::ostringstream os;
  write_oracle_csv(rep, os);
  const std::string csv = os.str();
  CHECK(csv.rfind("subset_bitmask,feasible,ee_bits_per_joule,sum_rate_bps,power_w\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);
}

TEST_CASE("full subset under the first start equals the baseline") {
  const Scenario s = tiny(2, 2, 3);
  const OracleReport rep = exhaustive_antenna_search(s, {});
  const JbasResult base = run_no_as_baseline(s, {});
  REQUIRE(base.usable());
  const SubsetEntry* full = rep.find((1U << s.total_antennas()) - 1);
  REQUIRE(full != nullptr);
  CHECK(full->ee_first == doctest::Approx(base.ee).epsilon(1e-5));
  CHECK(rep.best_ee >= base.ee);
}

TEST_CASE("alg1 compared with the oracle on a tiny instance") {
  const Scenario s = tiny(2, 2, 4);
  const OracleReport rep = exhaustive_antenna_search(s, {});
  const JbasResult r = run_algorithm1(s, {});
  REQUIRE(r.usable());
  CHECK(rep.ratio(r) > 0.0);
  // the oracle's own subset value for the chosen mask bounds alg1 within solver noise
  const SubsetEntry* e = rep.find(bits_from_mask(r.selection.mask));
  REQUIRE(e != nullptr);
  CHECK(rep.best_ee >= e->ee);
}

TEST_CASE("activity of the worst-user SINR rows at a converged point") {
  ScenarioConfig c;
  c.antennas_per_bs = 4;
  c.rate_target_bps = 5e6;
  const Scenario s = generate_scenario(c, 5);
  SolveOptions o;
  o.rel_tol = 1e-9;
  o.max_iter = 200;
  const JbasResult r = run_algorithm1(s, o);
  REQUIRE(r.status == RunStatus::converged);
  const ActivityReport rep = check_sinr_activity(r, s);
  for (std::size_t g = 0; g < rep.relative_gap.size(); ++g) MESSAGE("group ", g, " gap ", rep.relative_gap[g]);
  CHECK(rep.passed());

  JbasResult scaled = r;
  scaled.w.w[1] *= 0.5;
  const ActivityReport bad = check_sinr_activity(scaled, s);
  CHECK(std::find(bad.inactive_groups.begin(), bad.inactive_groups.end(), 1) != bad.inactive_groups.end());
}

TEST_CASE("activity for a single user reduces to the SINR definition") {
  const Scenario s = tiny(1, 2, 6, 1e6);
  SolveOptions o;
  o.rel_tol = 1e-9;
  o.max_iter = 200;
  const JbasResult r = run_no_as_baseline(s, o);
  REQUIRE(r.usable());
  const ActivityReport rep = check_sinr_activity(r, s);
  CHECK(rep.worst_user[0] == 0);
  CHECK(rep.passed());
}
