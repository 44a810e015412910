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

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "privmeter/errors.hpp"

namespace privmeter {

struct MeterId {
  std::uint64_t value = 0;
  auto operator<=>(const MeterId&) const = default;
};

struct AreaId {
  std::uint64_t value = 0;
  auto operator<=>(const AreaId&) const = default;
};

std::string to_string(MeterId id);
std::string to_string(AreaId id);

/// Number of reporting intervals in a billing period: the day is split into
/// ceil(1440 / interval_minutes) slots, repeated over `days` days.
///
/// Throws Errc::validation_error unless interval_minutes is in [1, 1440] and
/// days >= 1.
std::uint32_t compute_interval_count(std::uint32_t interval_minutes,
                                     std::uint32_t days);

/// Billing-period shape shared by meters, the provider, and the simulator.
/// interval_count() is derived on construction and kept consistent by
/// construction.
class BillingPeriodConfig {
 public:
  BillingPeriodConfig(std::uint32_t interval_minutes, std::uint32_t days)
      : interval_minutes_(interval_minutes),
        days_(days),
        interval_count_(compute_interval_count(interval_minutes, days)) {}

  std::uint32_t interval_minutes() const { return interval_minutes_; }
  std::uint32_t days() const { return days_; }
  std::uint32_t interval_count() const { return interval_count_; }

  bool operator==(const BillingPeriodConfig&) const = default;

 private:
  std::uint32_t interval_minutes_;
  std::uint32_t days_;
  std::uint32_t interval_count_;
};

/// Per-area unit prices, one entry per interval of the billing period.
struct TariffSchedule {
  AreaId area;
  std::vector<double> prices;  // currency units per kWh, strictly positive
};

/// Checks the schedule against the period shape: exactly interval_count()
/// prices, every one strictly positive and finite. Returns the schedule
/// unchanged so call sites can validate-and-assign.
const TariffSchedule& validate_tariff_schedule(const TariffSchedule& schedule,
                                               const BillingPeriodConfig& config);

/// One meter's true readings for a full period, in kWh per interval.
struct ConsumptionSeries {
  MeterId meter;
  std::vector<double> readings;
};

const ConsumptionSeries& validate_consumption_series(
    const ConsumptionSeries& series, const BillingPeriodConfig& config);

/// A perturbed reading in flight or at rest in the provider ledger. The value
/// may be negative: noise is additive and unclamped. replacement_flag marks
/// the re-perturbed last reading sent after a tariff adjustment.
struct NoisyReading {
  MeterId meter;
  std::uint32_t interval_index = 0;  // 1-based, 1..L
  double value = 0.0;                // kWh
  bool replacement_flag = false;
};

}  // namespace privmeter
