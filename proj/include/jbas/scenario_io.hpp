// SPDX-License-Identifier: Apache-2.0
//
// JSON persistence for scenarios. Channels are stored as interleaved re/im
// pairs, one row per (b, k) in b-major order.

#pragma once

#include <string>

#include "json.hpp"

#include "jbas/model.hpp"

namespace jbas {

nlohmann::json power_model_to_json(const PowerModel& pm);
/// Starts from `defaults` and overrides the keys present. Unknown keys are rejected.
PowerModel power_model_from_json(const nlohmann::json& j, const PowerModel& defaults = {});

nlohmann::json scenario_to_json(const Scenario& s);
/// Accepts either an explicit channel table or generation parameters
/// (B, N, U, L, placement, distance_m, rate_target_bps) plus a seed.
Scenario scenario_from_json(const nlohmann::json& j);

void save_scenario(const Scenario& s, const std::string& path);
Scenario load_scenario(const std::string& path);

}  // namespace jbas
