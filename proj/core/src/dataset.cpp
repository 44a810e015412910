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

#include "privmeter/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <vector>

#include "privmeter/kv_config.hpp"
#include "privmeter/noise_engine.hpp"
#include "privmeter/threefry.hpp"

namespace privmeter {

namespace {

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::array<std::string, 3> split3(const std::string& line, std::size_t row) {
  const auto first = line.find(',');
  const auto second = first == std::string::npos ? first : line.find(',', first + 1);
  if (first == std::string::npos || second == std::string::npos ||
      line.find(',', second + 1) != std::string::npos) {
    fail(Errc::dataset_error,
         "row " + std::to_string(row) + ": expected 3 comma-separated fields");
  }
  return {line.substr(0, first), line.substr(first + 1, second - first - 1),
          line.substr(second + 1)};
}

void expect_header(std::istream& in, const std::string& expected) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != expected) {
    fail(Errc::dataset_error, "expected header '" + expected + "'");
  }
}

struct SeriesBuilder {
  std::vector<double> values;
  std::vector<bool> present;
  std::size_t count = 0;
};

}  // namespace

std::map<MeterId, ConsumptionSeries> load_consumption_csv(
    std::istream& in, const BillingPeriodConfig& config) {
  expect_header(in, "meter_id,interval_index,kwh");
  const std::uint32_t interval_count = config.interval_count();

  std::map<MeterId, SeriesBuilder> builders;
  std::string line;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto [meter_text, index_text, kwh_text] = split3(line, row);

    const MeterId meter{parse_u64(meter_text, "row " + std::to_string(row))};
    const std::uint64_t index =
        parse_u64(index_text, "row " + std::to_string(row));
    const double kwh = parse_double(kwh_text, "row " + std::to_string(row));

    if (index < 1 || index > interval_count) {
      fail(Errc::dataset_error, "row " + std::to_string(row) +
                                    ": interval index " + std::to_string(index) +
                                    " outside 1.." +
                                    std::to_string(interval_count));
    }
    if (!std::isfinite(kwh) || kwh < 0.0) {
      fail(Errc::dataset_error,
           "row " + std::to_string(row) + ": kwh must be finite and >= 0");
    }

    auto& builder = builders[meter];
    if (builder.values.empty()) {
      builder.values.assign(interval_count, 0.0);
      builder.present.assign(interval_count, false);
    }
    if (builder.present[index - 1]) {
      fail(Errc::dataset_error, "row " + std::to_string(row) +
                                    ": duplicate reading for meter " +
                                    to_string(meter) + " interval " +
                                    std::to_string(index));
    }
    builder.present[index - 1] = true;
    builder.values[index - 1] = kwh;
    ++builder.count;
  }

  if (builders.empty()) {
    fail(Errc::dataset_error, "dataset has no rows");
  }

  std::map<MeterId, ConsumptionSeries> dataset;
  for (auto& [meter, builder] : builders) {
    if (builder.count != interval_count) {
      for (std::uint32_t i = 0; i < interval_count; ++i) {
        if (!builder.present[i]) {
          fail(Errc::dataset_error,
               "meter " + to_string(meter) + " is missing interval " +
                   std::to_string(i + 1));
        }
      }
    }
    ConsumptionSeries series{meter, std::move(builder.values)};
    validate_consumption_series(series, config);
    dataset.emplace(meter, std::move(series));
  }
  return dataset;
}

void write_consumption_csv(
    std::ostream& out, const std::map<MeterId, ConsumptionSeries>& dataset) {
  out << "meter_id,interval_index,kwh\n";
  char value_text[64];
  for (const auto& [meter, series] : dataset) {
    for (std::size_t i = 0; i < series.readings.size(); ++i) {
      std::snprintf(value_text, sizeof(value_text), "%.6f",
                    series.readings[i]);
      out << meter.value << ',' << (i + 1) << ',' << value_text << '\n';
    }
  }
}

std::map<AreaId, TariffSchedule> load_tariff_csv(
    std::istream& in, const BillingPeriodConfig& config) {
  expect_header(in, "area_id,interval_index,price");
  const std::uint32_t interval_count = config.interval_count();

  std::map<AreaId, SeriesBuilder> builders;
  std::string line;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto [area_text, index_text, price_text] = split3(line, row);

    const AreaId area{parse_u64(area_text, "row " + std::to_string(row))};
    const std::uint64_t index =
        parse_u64(index_text, "row " + std::to_string(row));
    const double price = parse_double(price_text, "row " + std::to_string(row));

    if (index < 1 || index > interval_count) {
      fail(Errc::dataset_error, "row " + std::to_string(row) +
                                    ": interval index outside 1.." +
                                    std::to_string(interval_count));
    }
    if (!std::isfinite(price) || price <= 0.0) {
      fail(Errc::price_not_positive,
           "row " + std::to_string(row) + ": price must be finite and > 0");
    }

    auto& builder = builders[area];
    if (builder.values.empty()) {
      builder.values.assign(interval_count, 0.0);
      builder.present.assign(interval_count, false);
    }
    if (builder.present[index - 1]) {
      fail(Errc::dataset_error, "row " + std::to_string(row) +
                                    ": duplicate tariff for area " +
                                    to_string(area) + " interval " +
                                    std::to_string(index));
    }
    builder.present[index - 1] = true;
    builder.values[index - 1] = price;
    ++builder.count;
  }

  if (builders.empty()) {
    fail(Errc::dataset_error, "tariff file has no rows");
  }

  std::map<AreaId, TariffSchedule> tariffs;
  for (auto& [area, builder] : builders) {
    for (std::uint32_t i = 0; i < interval_count; ++i) {
      if (!builder.present[i]) {
        fail(Errc::dataset_error, "area " + to_string(area) +
                                      " is missing a tariff for interval " +
                                      std::to_string(i + 1));
      }
    }
    TariffSchedule schedule{area, std::move(builder.values)};
    validate_tariff_schedule(schedule, config);
    tariffs.emplace(area, std::move(schedule));
  }
  return tariffs;
}

std::uint32_t max_interval_index_csv(std::istream& in,
                                     const std::string& header) {
  expect_header(in, header);
  std::string line;
  std::size_t row = 1;
  std::uint64_t max_index = 0;
  while (std::getline(in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto [_, index_text, __] = split3(line, row);
    max_index = std::max(
        max_index, parse_u64(index_text, "row " + std::to_string(row)));
  }
  if (max_index == 0 || max_index > 0xFFFFFFFFull) {
    fail(Errc::dataset_error, "no usable interval indices found");
  }
  return static_cast<std::uint32_t>(max_index);
}

void write_tariff_csv(std::ostream& out,
                      const std::map<AreaId, TariffSchedule>& tariffs) {
  out << "area_id,interval_index,price\n";
  char price_text[64];
  for (const auto& [area, schedule] : tariffs) {
    for (std::size_t i = 0; i < schedule.prices.size(); ++i) {
      std::snprintf(price_text, sizeof(price_text), "%.6f",
                    schedule.prices[i]);
      out << area.value << ',' << (i + 1) << ',' << price_text << '\n';
    }
  }
}

SeedStore load_seed_file(std::istream& in) {
  const KvSection section = parse_kv_flat(in);
  if (section.entries.empty()) {
    fail(Errc::dataset_error, "seed file has no entries");
  }

  SeedStore store;
  for (const auto& [key, value] : section.entries) {
    const MeterId meter{parse_u64(key, "seed file meter id")};
    if (value.size() != 64) {
      fail(Errc::dataset_error, "seed for meter " + to_string(meter) +
                                    " must be 64 hex characters, got " +
                                    std::to_string(value.size()));
    }
    std::array<std::uint8_t, 32> secret{};
    for (std::size_t i = 0; i < 32; ++i) {
      const auto nibble = [&](char c) -> unsigned {
        if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
        fail(Errc::dataset_error,
             "seed for meter " + to_string(meter) + " is not valid hex");
      };
      secret[i] = static_cast<std::uint8_t>((nibble(value[2 * i]) << 4) |
                                            nibble(value[2 * i + 1]));
    }
    store.secrets[meter] = secret;
  }
  return store;
}

void write_seed_file(std::ostream& out, const SeedStore& seeds) {
  static const char* kHex = "0123456789abcdef";
  for (const auto& [meter, secret] : seeds.secrets) {
    out << meter.value << '=';
    for (const std::uint8_t byte : secret) {
      out << kHex[byte >> 4] << kHex[byte & 0xF];
    }
    out << '\n';
  }
}

std::map<MeterId, ConsumptionSeries> generate_synthetic(
    std::uint32_t meters, const BillingPeriodConfig& config,
    std::uint64_t profile_seed) {
  if (meters < 1) {
    fail(Errc::validation_error, "need at least one meter");
  }

  std::vector<MeterId> ids;
  ids.reserve(meters);
  for (std::uint32_t m = 1; m <= meters; ++m) ids.push_back(MeterId{m});
  const SeedStore seeds = SeedStore::derive_from_master(profile_seed, ids);

  const double interval_hours = config.interval_minutes() / 60.0;
  const std::uint32_t interval_count = config.interval_count();

  std::map<MeterId, ConsumptionSeries> dataset;
  for (const MeterId id : ids) {
    // Household parameters from one dedicated block.
    const threefry::Block params = threefry::encrypt(
        {profile_seed, 0x70726F66696C65ull, 0, 0}, {id.value, 1, 0, 0});
    const double scale = 0.7 + 0.7 * threefry::to_unit_open(params[0]);
    const double morning = 0.3 + 0.6 * threefry::to_unit_open(params[1]);
    const double evening = 0.5 + 0.8 * threefry::to_unit_open(params[2]);
    const double jitter_h = 1.5 * (threefry::to_unit_open(params[3]) - 0.5);

    GaussianStream wobble =
        derive_stream(seeds.material_for(id, /*period_id=*/0), 1.0);

    std::vector<double> readings(interval_count);
    for (std::uint32_t i = 0; i < interval_count; ++i) {
      const double minute_of_day =
          static_cast<double>((static_cast<std::uint64_t>(i) *
                               config.interval_minutes()) %
                              1440u);
      const double hour = minute_of_day / 60.0;

      const auto bump = [](double x) { return std::exp(-0.5 * x * x); };
      double power_kw = 0.25;  // fridge-and-standby floor
      power_kw += morning * bump((hour - 7.5 - jitter_h) / 1.5);
      power_kw += evening * bump((hour - 19.5 - jitter_h) / 2.0);
      power_kw = scale * power_kw + 0.08 * wobble.next();
      power_kw = std::max(power_kw, 0.0);

      readings[i] = power_kw * interval_hours;
    }
    dataset.emplace(id, ConsumptionSeries{id, std::move(readings)});
  }
  return dataset;
}

void write_bills_csv(std::ostream& out, std::span<const BillRow> rows) {
  out << "meter_id,period_id,final_bill,adjusted\n";
  char amount_text[64];
  for (const BillRow& row : rows) {
    // %.2f rounds to nearest with ties to even under the default rounding
    // mode; the ledger keeps full precision.
    std::snprintf(amount_text, sizeof(amount_text), "%.2f", row.final_bill);
    out << row.meter.value << ',' << row.period_id << ',' << amount_text << ','
        << (row.adjusted ? "true" : "false") << '\n';
  }
}

}  // namespace privmeter
