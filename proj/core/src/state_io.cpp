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

#include "privmeter/state_io.hpp"

#include <bit>
#include <string_view>

#include "privmeter/meter.hpp"
#include "privmeter/utility_billing.hpp"

namespace privmeter {

namespace {

constexpr char kMagic[4] = {'P', 'M', 'S', 'T'};
constexpr std::uint8_t kFormatVersion = 1;

void put_u8(std::ostream& out, std::uint8_t value) {
  out.put(static_cast<char>(value));
}

void put_u32(std::ostream& out, std::uint32_t value) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.put(static_cast<char>((value >> shift) & 0xFF));
  }
}

void put_u64(std::ostream& out, std::uint64_t value) {
  for (int shift = 0; shift < 64; shift += 8) {
    out.put(static_cast<char>((value >> shift) & 0xFF));
  }
}

void put_f64(std::ostream& out, double value) {
  put_u64(out, std::bit_cast<std::uint64_t>(value));
}

std::uint8_t take_u8(std::istream& in) {
  const int c = in.get();
  if (c == std::char_traits<char>::eof()) {
    fail(Errc::io_error, "state file truncated");
  }
  return static_cast<std::uint8_t>(c);
}

std::uint32_t take_u32(std::istream& in) {
  std::uint32_t value = 0;
  for (int shift = 0; shift < 32; shift += 8) {
    value |= static_cast<std::uint32_t>(take_u8(in)) << shift;
  }
  return value;
}

std::uint64_t take_u64(std::istream& in) {
  std::uint64_t value = 0;
  for (int shift = 0; shift < 64; shift += 8) {
    value |= static_cast<std::uint64_t>(take_u8(in)) << shift;
  }
  return value;
}

double take_f64(std::istream& in) {
  return std::bit_cast<double>(take_u64(in));
}

void put_doubles(std::ostream& out, const std::vector<double>& values) {
  put_u32(out, static_cast<std::uint32_t>(values.size()));
  for (const double value : values) put_f64(out, value);
}

std::vector<double> take_doubles(std::istream& in, std::size_t expected,
                                 const char* what) {
  const std::uint32_t count = take_u32(in);
  if (count != expected) {
    fail(Errc::io_error, std::string(what) + ": expected " +
                             std::to_string(expected) + " values, found " +
                             std::to_string(count));
  }
  std::vector<double> values(count);
  for (double& value : values) value = take_f64(in);
  return values;
}

}  // namespace

SimulationState capture_state(const Simulation& simulation) {
  SimulationState state;
  state.config = simulation.config().period;
  state.period_id = simulation.config().period_id;
  state.max_adjustments = simulation.config().max_adjustments;

  const ProviderLedger& ledger = simulation.ledger();
  for (const MeterId meter_id : ledger.meters()) {
    const Meter& meter = simulation.meter(meter_id);
    if (meter.phase() != MeterPhase::closed) {
      fail(Errc::phase_error, "meter " + to_string(meter_id) +
                                  " has not closed its period; nothing to "
                                  "persist");
    }

    MeterPeriodState entry;
    entry.area = meter.area();
    entry.retained_noise.assign(meter.retained_noise().begin(),
                                meter.retained_noise().end());
    entry.last_true_reading = *meter.last_true_reading();
    entry.adjustments_applied = meter.adjustments_applied();
    entry.noisy_readings = ledger.readings(meter_id);
    entry.final_bill = ledger.final_bill(meter_id).value_or(0.0);
    state.meters.emplace(meter_id, std::move(entry));

    state.tariffs.try_emplace(meter.area(), ledger.area_prices(meter.area()));
  }
  return state;
}

void save_state(std::ostream& out, const SimulationState& state) {
  out.write(kMagic, sizeof(kMagic));
  put_u8(out, kFormatVersion);
  put_u64(out, state.period_id);
  put_u32(out, state.config.interval_minutes());
  put_u32(out, state.config.days());
  put_u32(out, state.max_adjustments);

  put_u32(out, static_cast<std::uint32_t>(state.tariffs.size()));
  for (const auto& [area, prices] : state.tariffs) {
    put_u64(out, area.value);
    put_doubles(out, prices);
  }

  put_u32(out, static_cast<std::uint32_t>(state.meters.size()));
  for (const auto& [meter, entry] : state.meters) {
    put_u64(out, meter.value);
    put_u64(out, entry.area.value);
    put_u32(out, entry.adjustments_applied);
    put_doubles(out, entry.retained_noise);
    put_f64(out, entry.last_true_reading);
    put_doubles(out, entry.noisy_readings);
    put_f64(out, entry.final_bill);
  }

  if (!out) {
    fail(Errc::io_error, "failed to write state");
  }
}

SimulationState load_state(std::istream& in) {
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::string_view(magic, 4) != std::string_view(kMagic, 4)) {
    fail(Errc::io_error, "not a simulation state file (bad magic)");
  }
  const std::uint8_t version = take_u8(in);
  if (version != kFormatVersion) {
    fail(Errc::io_error,
         "unsupported state format version " + std::to_string(version));
  }

  SimulationState state;
  state.period_id = take_u64(in);
  const std::uint32_t interval_minutes = take_u32(in);
  const std::uint32_t days = take_u32(in);
  state.config = BillingPeriodConfig(interval_minutes, days);
  state.max_adjustments = take_u32(in);
  const std::uint32_t interval_count = state.config.interval_count();

  const std::uint32_t area_count = take_u32(in);
  for (std::uint32_t i = 0; i < area_count; ++i) {
    const AreaId area{take_u64(in)};
    state.tariffs[area] = take_doubles(in, interval_count, "area tariffs");
  }

  const std::uint32_t meter_count = take_u32(in);
  for (std::uint32_t i = 0; i < meter_count; ++i) {
    const MeterId meter{take_u64(in)};
    MeterPeriodState entry;
    entry.area = AreaId{take_u64(in)};
    entry.adjustments_applied = take_u32(in);
    entry.retained_noise =
        take_doubles(in, interval_count - 1, "retained noise");
    entry.last_true_reading = take_f64(in);
    entry.noisy_readings = take_doubles(in, interval_count, "noisy readings");
    entry.final_bill = take_f64(in);
    if (!state.tariffs.count(entry.area)) {
      fail(Errc::io_error, "meter " + to_string(meter) +
                               " references area " + to_string(entry.area) +
                               " with no tariff schedule");
    }
    state.meters.emplace(meter, std::move(entry));
  }

  if (!in) {
    fail(Errc::io_error, "state file truncated");
  }
  return state;
}

RebillOutcome rebill_from_state(
    SimulationState& state,
    const std::map<AreaId, TariffSchedule>& new_tariffs) {
  // Rebuild the provider's books from the snapshot.
  ProviderLedger ledger(state.config);
  for (const auto& [meter, entry] : state.meters) {
    ledger.register_meter(meter, entry.area);
  }
  for (const auto& [area, prices] : state.tariffs) {
    for (std::uint32_t i = 0; i < prices.size(); ++i) {
      ledger.issue_tariff(area, i + 1, prices[i]);
    }
  }
  for (const auto& [meter, entry] : state.meters) {
    for (std::uint32_t i = 0; i < entry.noisy_readings.size(); ++i) {
      ledger.record_reading(
          NoisyReading{meter, i + 1, entry.noisy_readings[i], false});
    }
  }

  RebillOutcome outcome;
  for (auto& [meter_id, entry] : state.meters) {
    auto tariff_it = new_tariffs.find(entry.area);
    if (tariff_it == new_tariffs.end()) {
      fail(Errc::validation_error,
           "no replacement tariff vector for area " + to_string(entry.area));
    }

    Meter meter = Meter::restore_closed(
        meter_id, entry.area, state.config, entry.retained_noise,
        entry.last_true_reading, entry.adjustments_applied,
        state.max_adjustments);
    NoisyReading replacement;
    try {
      replacement = meter.apply_tariff_adjustment(tariff_it->second);
    } catch (const Error& error) {
      if (error.code() == Errc::adjustment_budget_exhausted) {
        outcome.failures[meter_id] = error.code();
        continue;
      }
      throw;
    }

    const double rebilled =
        ledger.rebill(meter_id, tariff_it->second, replacement);
    outcome.rebilled_bills[meter_id] = rebilled;
    outcome.adjusted_flags[meter_id] = ledger.bill_adjusted(meter_id);

    entry.adjustments_applied = meter.adjustments_applied();
    entry.noisy_readings.back() = replacement.value;
  }
  return outcome;
}

}  // namespace privmeter
