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

#include "privmeter/core_types.hpp"

#include <cmath>

namespace privmeter {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::validation_error: return "ValidationError";
    case Errc::price_not_positive: return "PriceNotPositive";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::sequence_error: return "SequenceError";
    case Errc::phase_error: return "PhaseError";
    case Errc::adjustment_budget_exhausted: return "AdjustmentBudgetExhausted";
    case Errc::duplicate_reading: return "DuplicateReading";
    case Errc::replacement_out_of_place: return "ReplacementOutOfPlace";
    case Errc::incomplete_period: return "IncompletePeriod";
    case Errc::dataset_error: return "DatasetError";
    case Errc::routing_error: return "RoutingError";
    case Errc::io_error: return "IoError";
    case Errc::parse_error: return "ParseError";
  }
  return "UnknownError";
}

std::string to_string(MeterId id) { return std::to_string(id.value); }
std::string to_string(AreaId id) { return std::to_string(id.value); }

std::uint32_t compute_interval_count(std::uint32_t interval_minutes,
                                     std::uint32_t days) {
  constexpr std::uint32_t kMinutesPerDay = 24 * 60;
  if (interval_minutes < 1 || interval_minutes > kMinutesPerDay) {
    fail(Errc::validation_error,
         "interval_minutes must be in [1, 1440], got " +
             std::to_string(interval_minutes));
  }
  if (days < 1) {
    fail(Errc::validation_error, "days must be >= 1");
  }
  const std::uint32_t per_day =
      (kMinutesPerDay + interval_minutes - 1) / interval_minutes;
  return per_day * days;
}

const TariffSchedule& validate_tariff_schedule(
    const TariffSchedule& schedule, const BillingPeriodConfig& config) {
  if (schedule.prices.size() != config.interval_count()) {
    fail(Errc::length_mismatch,
         "tariff schedule for area " + to_string(schedule.area) + " has " +
             std::to_string(schedule.prices.size()) + " prices, expected " +
             std::to_string(config.interval_count()));
  }
  for (std::size_t i = 0; i < schedule.prices.size(); ++i) {
    const double price = schedule.prices[i];
    if (!std::isfinite(price) || price <= 0.0) {
      fail(Errc::price_not_positive,
           "tariff at interval " + std::to_string(i + 1) + " for area " +
               to_string(schedule.area) + " must be finite and > 0");
    }
  }
  return schedule;
}

const ConsumptionSeries& validate_consumption_series(
    const ConsumptionSeries& series, const BillingPeriodConfig& config) {
  if (series.readings.size() != config.interval_count()) {
    fail(Errc::length_mismatch,
         "consumption series for meter " + to_string(series.meter) + " has " +
             std::to_string(series.readings.size()) + " readings, expected " +
             std::to_string(config.interval_count()));
  }
  for (std::size_t i = 0; i < series.readings.size(); ++i) {
    const double value = series.readings[i];
    if (!std::isfinite(value) || value < 0.0) {
      fail(Errc::validation_error,
           "reading at interval " + std::to_string(i + 1) + " for meter " +
               to_string(series.meter) + " must be finite and >= 0");
    }
  }
  return series;
}

}  // namespace privmeter
