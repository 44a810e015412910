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

#include "privmeter/utility_billing.hpp"

#include <cmath>

namespace privmeter {

ProviderLedger::ProviderLedger(BillingPeriodConfig config) : config_(config) {}

void ProviderLedger::register_meter(MeterId meter, AreaId area) {
  auto [it, inserted] = accounts_.try_emplace(meter);
  if (!inserted) {
    fail(Errc::validation_error,
         "meter " + to_string(meter) + " already registered");
  }
  it->second.area = area;
  it->second.readings.assign(config_.interval_count(), 0.0);
  it->second.present.assign(config_.interval_count(), false);
  areas_.try_emplace(area);
}

TariffAnnouncement ProviderLedger::issue_tariff(AreaId area,
                                                std::uint32_t interval_index,
                                                double price) {
  if (!std::isfinite(price) || price <= 0.0) {
    fail(Errc::price_not_positive,
         "tariff for area " + to_string(area) + " interval " +
             std::to_string(interval_index) + " must be finite and > 0");
  }
  auto& book = areas_[area];
  const std::uint32_t expected =
      static_cast<std::uint32_t>(book.prices.size()) + 1;
  if (interval_index != expected || interval_index > config_.interval_count()) {
    fail(Errc::sequence_error,
         "area " + to_string(area) + " expected tariff for interval " +
             std::to_string(expected) + ", got " +
             std::to_string(interval_index));
  }
  book.prices.push_back(price);
  return TariffAnnouncement{area, interval_index, price};
}

void ProviderLedger::record_reading(const NoisyReading& reading) {
  auto it = accounts_.find(reading.meter);
  if (it == accounts_.end()) {
    fail(Errc::incomplete_period,
         "meter " + to_string(reading.meter) + " is not registered");
  }
  MeterAccount& account = it->second;

  const std::uint32_t interval_count = config_.interval_count();
  if (reading.interval_index < 1 || reading.interval_index > interval_count) {
    fail(Errc::validation_error,
         "interval index " + std::to_string(reading.interval_index) +
             " outside 1.." + std::to_string(interval_count));
  }
  if (!std::isfinite(reading.value)) {
    fail(Errc::validation_error, "noisy reading must be finite");
  }

  const std::size_t slot = reading.interval_index - 1;
  if (reading.replacement_flag) {
    if (reading.interval_index != interval_count) {
      fail(Errc::replacement_out_of_place,
           "replacement readings may only target interval " +
               std::to_string(interval_count) + ", got " +
               std::to_string(reading.interval_index));
    }
    if (account.recorded != interval_count) {
      fail(Errc::incomplete_period,
           "meter " + to_string(reading.meter) +
               " has no completed period to adjust");
    }
    account.readings[slot] = reading.value;
    account.closing_replaced = true;
    return;
  }

  if (account.present[slot]) {
    fail(Errc::duplicate_reading,
         "meter " + to_string(reading.meter) + " interval " +
             std::to_string(reading.interval_index) + " already recorded");
  }
  account.present[slot] = true;
  account.readings[slot] = reading.value;
  ++account.recorded;
}

std::vector<double> ProviderLedger::compute_partial_bills(MeterId meter) const {
  const MeterAccount& account = this->account(meter);
  if (account.recorded != config_.interval_count()) {
    fail(Errc::incomplete_period,
         "meter " + to_string(meter) + " has " +
             std::to_string(account.recorded) + " of " +
             std::to_string(config_.interval_count()) + " readings");
  }
  const std::vector<double>& prices = complete_prices(account.area);

  std::vector<double> partial_bills(config_.interval_count());
  for (std::size_t i = 0; i < partial_bills.size(); ++i) {
    partial_bills[i] = account.readings[i] * prices[i];
  }
  return partial_bills;
}

double ProviderLedger::compute_final_bill(MeterId meter) {
  const std::vector<double> partial_bills = compute_partial_bills(meter);
  double bill = 0.0;
  for (const double partial : partial_bills) {
    bill += partial;
  }
  auto& account = accounts_.at(meter);
  account.final_bill = bill;
  return bill;
}

double ProviderLedger::rebill(MeterId meter, const TariffSchedule& new_tariffs,
                              const NoisyReading& replacement) {
  validate_tariff_schedule(new_tariffs, config_);
  if (!replacement.replacement_flag) {
    fail(Errc::replacement_out_of_place,
         "rebill requires a reading with the replacement flag");
  }
  if (replacement.meter != meter) {
    fail(Errc::validation_error,
         "replacement reading addressed to meter " +
             to_string(replacement.meter) + ", rebilling meter " +
             to_string(meter));
  }
  {
    const MeterAccount& existing = account(meter);
    if (existing.recorded != config_.interval_count()) {
      fail(Errc::incomplete_period,
           "meter " + to_string(meter) + " has an incomplete period");
    }
  }

  record_reading(replacement);

  MeterAccount& account = accounts_.at(meter);
  const std::vector<double>& original = complete_prices(account.area);

  double bill = 0.0;
  for (std::size_t i = 0; i < new_tariffs.prices.size(); ++i) {
    bill += account.readings[i] * new_tariffs.prices[i];
  }
  account.rebilled_bill = bill;
  account.adjusted = new_tariffs.prices != original;
  areas_[account.area].replacements.push_back(new_tariffs.prices);
  return bill;
}

std::vector<MeterId> ProviderLedger::meters() const {
  std::vector<MeterId> ids;
  ids.reserve(accounts_.size());
  for (const auto& [id, _] : accounts_) ids.push_back(id);
  return ids;
}

AreaId ProviderLedger::area_of(MeterId meter) const {
  return account(meter).area;
}

std::uint32_t ProviderLedger::recorded_count(MeterId meter) const {
  return account(meter).recorded;
}

const std::vector<double>& ProviderLedger::readings(MeterId meter) const {
  return account(meter).readings;
}

const std::vector<double>& ProviderLedger::area_prices(AreaId area) const {
  auto it = areas_.find(area);
  if (it == areas_.end()) {
    fail(Errc::routing_error, "unknown area " + to_string(area));
  }
  return it->second.prices;
}

std::optional<double> ProviderLedger::final_bill(MeterId meter) const {
  return account(meter).final_bill;
}

std::optional<double> ProviderLedger::rebilled_bill(MeterId meter) const {
  return account(meter).rebilled_bill;
}

bool ProviderLedger::bill_adjusted(MeterId meter) const {
  return account(meter).adjusted;
}

std::size_t ProviderLedger::state_bytes() const {
  std::size_t bytes = 0;
  for (const auto& [_, account] : accounts_) {
    bytes += account.readings.size() * sizeof(double);
    if (account.final_bill) bytes += sizeof(double);
    if (account.rebilled_bill) bytes += sizeof(double);
  }
  for (const auto& [_, book] : areas_) {
    bytes += book.prices.size() * sizeof(double);
    for (const auto& replacement : book.replacements) {
      bytes += replacement.size() * sizeof(double);
    }
  }
  return bytes;
}

const ProviderLedger::MeterAccount& ProviderLedger::account(
    MeterId meter) const {
  auto it = accounts_.find(meter);
  if (it == accounts_.end()) {
    fail(Errc::incomplete_period,
         "meter " + to_string(meter) + " is not registered");
  }
  return it->second;
}

const std::vector<double>& ProviderLedger::complete_prices(AreaId area) const {
  auto it = areas_.find(area);
  if (it == areas_.end() ||
      it->second.prices.size() != config_.interval_count()) {
    fail(Errc::incomplete_period,
         "area " + to_string(area) + " has an incomplete tariff schedule");
  }
  return it->second.prices;
}

}  // namespace privmeter
