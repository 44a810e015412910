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

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "privmeter/core_types.hpp"

namespace privmeter {

/// A per-interval price announcement on its way to an area's meters.
struct TariffAnnouncement {
  AreaId area;
  std::uint32_t interval_index = 0;
  double price = 0.0;
};

/// The utility provider's books: issued tariffs per area, collected noisy
/// readings per meter, and computed bills. By construction the ledger never
/// sees a true reading; the only ingestion path takes NoisyReading values.
class ProviderLedger {
 public:
  explicit ProviderLedger(BillingPeriodConfig config);

  /// Adds a meter to the books under an area. Readings from unregistered
  /// meters are rejected.
  void register_meter(MeterId meter, AreaId area);

  /// Records the price for one interval of an area's schedule and returns the
  /// announcement to broadcast. Intervals must be issued in order.
  TariffAnnouncement issue_tariff(AreaId area, std::uint32_t interval_index,
                                  double price);

  /// Stores one noisy reading. Duplicate intervals are rejected; a reading
  /// with the replacement flag is accepted only for the final interval of a
  /// completed period, where it overwrites the closing reading.
  void record_reading(const NoisyReading& reading);

  /// Noisy partial bills nb_i = nc_i * trf_i for a fully reported meter.
  std::vector<double> compute_partial_bills(MeterId meter) const;

  /// Final bill: the sum of the noisy partial bills in ascending interval
  /// order (fixed order keeps results bit-reproducible run to run). The
  /// result is stored in the ledger.
  double compute_final_bill(MeterId meter);

  /// Rebills a completed period under a replacement tariff vector: swaps in
  /// the replacement closing reading, keeps readings 1..L-1, and recomputes
  /// the sum against the new prices. Stores and returns the new bill.
  double rebill(MeterId meter, const TariffSchedule& new_tariffs,
                const NoisyReading& replacement);

  const BillingPeriodConfig& config() const { return config_; }
  std::vector<MeterId> meters() const;
  AreaId area_of(MeterId meter) const;
  std::uint32_t recorded_count(MeterId meter) const;
  const std::vector<double>& readings(MeterId meter) const;
  const std::vector<double>& area_prices(AreaId area) const;
  std::optional<double> final_bill(MeterId meter) const;
  std::optional<double> rebilled_bill(MeterId meter) const;
  /// True when the latest bill reflects a tariff vector that differs from the
  /// originally issued schedule.
  bool bill_adjusted(MeterId meter) const;

  /// Bytes of billing state currently held (readings, tariffs, partial bill
  /// scratch, bills); the harness compares this against the analytic model.
  std::size_t state_bytes() const;

 private:
  struct MeterAccount {
    AreaId area;
    std::vector<double> readings;     // indexed by interval - 1
    std::vector<bool> present;
    std::uint32_t recorded = 0;
    bool closing_replaced = false;
    std::optional<double> final_bill;
    std::optional<double> rebilled_bill;
    bool adjusted = false;
  };

  struct AreaBook {
    std::vector<double> prices;                    // issued so far, in order
    std::vector<std::vector<double>> replacements;  // adjustment history
  };

  const MeterAccount& account(MeterId meter) const;
  const std::vector<double>& complete_prices(AreaId area) const;

  BillingPeriodConfig config_;
  std::map<MeterId, MeterAccount> accounts_;
  std::map<AreaId, AreaBook> areas_;
};

}  // namespace privmeter
