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
#include <string>

#include "privmeter/core_types.hpp"
#include "privmeter/network_sim.hpp"

namespace privmeter {

/// Canonical consumption CSV: header `meter_id,interval_index,kwh`, one row
/// per (meter, interval), dense over 1..L for every meter. Returns validated
/// per-meter series. Sparse or duplicated rows are reported with their
/// position.
std::map<MeterId, ConsumptionSeries> load_consumption_csv(
    std::istream& in, const BillingPeriodConfig& config);

void write_consumption_csv(std::ostream& out,
                           const std::map<MeterId, ConsumptionSeries>& dataset);

/// Tariff CSV: header `area_id,interval_index,price`, dense over 1..L per
/// area, every price strictly positive.
std::map<AreaId, TariffSchedule> load_tariff_csv(
    std::istream& in, const BillingPeriodConfig& config);

/// Largest interval_index present in a 3-column CSV with the given header.
/// Lets callers infer the period length before a full parse.
std::uint32_t max_interval_index_csv(std::istream& in,
                                     const std::string& header);

void write_tariff_csv(std::ostream& out,
                      const std::map<AreaId, TariffSchedule>& tariffs);

/// Seed file: one `meter_id=<64 hex chars>` line per meter.
SeedStore load_seed_file(std::istream& in);
void write_seed_file(std::ostream& out, const SeedStore& seeds);

/// Deterministic synthetic load profiles: a base load with morning and
/// evening peaks, per-meter scale and phase variation, and interval noise,
/// clamped to non-negative. Same (meters, config, profile_seed) always yields
/// the same dataset.
std::map<MeterId, ConsumptionSeries> generate_synthetic(
    std::uint32_t meters, const BillingPeriodConfig& config,
    std::uint64_t profile_seed);

struct BillRow {
  MeterId meter;
  std::uint64_t period_id = 0;
  double final_bill = 0.0;
  bool adjusted = false;
};

/// Bill export CSV: `meter_id,period_id,final_bill,adjusted`. Amounts are
/// formatted to two decimals, round half to even; full precision stays in the
/// ledger and the state file.
void write_bills_csv(std::ostream& out, std::span<const BillRow> rows);

}  // namespace privmeter
