// Copyright 2026 The PrivMeter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <vector>

#include "privmeter/core_types.hpp"
#include "privmeter/network_sim.hpp"

namespace privmeter {

/// Everything a later invocation needs to apply a tariff adjustment: the
/// provider's collected readings and issued tariffs plus each meter's
/// retained noise and true closing reading.
struct MeterPeriodState {
  AreaId area;
  std::vector<double> retained_noise;  // length L-1
  double last_true_reading = 0.0;
  std::uint32_t adjustments_applied = 0;
  std::vector<double> noisy_readings;  // length L, as recorded by the provider
  double final_bill = 0.0;
};

struct SimulationState {
  BillingPeriodConfig config{15, 1};
  std::uint64_t period_id = 1;
  std::uint32_t max_adjustments = 1;
  std::map<AreaId, std::vector<double>> tariffs;  // issued schedule per area
  std::map<MeterId, MeterPeriodState> meters;
};

/// Snapshot of a finished scenario-one run.
SimulationState capture_state(const Simulation& simulation);

/// Versioned little-endian binary container ("PMST" magic, format byte).
/// Doubles are stored as bit patterns, so save -> load round-trips exactly.
void save_state(std::ostream& out, const SimulationState& state);
SimulationState load_state(std::istream& in);

struct RebillOutcome {
  std::map<MeterId, double> rebilled_bills;
  std::map<MeterId, bool> adjusted_flags;
  std::map<MeterId, Errc> failures;
};

/// Replays the adjustment round from persisted state: recomputes each meter's
/// closing noise under the replacement tariffs, swaps the closing reading,
/// and rebills. Mutates `state` (replaced readings, bumped adjustment
/// counters) so it can be persisted again.
RebillOutcome rebill_from_state(SimulationState& state,
                                const std::map<AreaId, TariffSchedule>& new_tariffs);

}  // namespace privmeter
