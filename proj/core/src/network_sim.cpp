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

#include "privmeter/network_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "privmeter/kv_config.hpp"
#include "privmeter/threefry.hpp"

namespace privmeter {

namespace {

void append_u32(std::vector<std::byte>& out, std::uint32_t value) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<std::byte>((value >> shift) & 0xFF));
  }
}

void append_u64(std::vector<std::byte>& out, std::uint64_t value) {
  for (int shift = 0; shift < 64; shift += 8) {
    out.push_back(static_cast<std::byte>((value >> shift) & 0xFF));
  }
}

void append_f64(std::vector<std::byte>& out, double value) {
  append_u64(out, std::bit_cast<std::uint64_t>(value));
}

std::uint32_t read_u32(std::span<const std::byte> in, std::size_t offset) {
  std::uint32_t value = 0;
  for (int i = 0; i < 4; ++i) {
    value |= static_cast<std::uint32_t>(in[offset + i]) << (8 * i);
  }
  return value;
}

std::uint64_t read_u64(std::span<const std::byte> in, std::size_t offset) {
  std::uint64_t value = 0;
  for (int i = 0; i < 8; ++i) {
    value |= static_cast<std::uint64_t>(in[offset + i]) << (8 * i);
  }
  return value;
}

double read_f64(std::span<const std::byte> in, std::size_t offset) {
  return std::bit_cast<double>(read_u64(in, offset));
}

void require_size(std::span<const std::byte> payload, std::size_t expected,
                  const char* what) {
  if (payload.size() != expected) {
    fail(Errc::parse_error, std::string(what) + " payload has " +
                                std::to_string(payload.size()) +
                                " bytes, expected " + std::to_string(expected));
  }
}

}  // namespace

const char* to_string(MessageKind kind) noexcept {
  switch (kind) {
    case MessageKind::tariff_down: return "tariff_down";
    case MessageKind::tariff_vector_down: return "tariff_vector_down";
    case MessageKind::reading_up: return "reading_up";
    case MessageKind::bill_down: return "bill_down";
  }
  return "?";
}

std::string to_string(const NodeRef& node) {
  switch (node.kind) {
    case NodeRef::Kind::provider: return "up";
    case NodeRef::Kind::aggregator: return "agg:" + std::to_string(node.id);
    case NodeRef::Kind::meter: return "sm:" + std::to_string(node.id);
  }
  return "?";
}

std::vector<std::byte> encode_tariff(const TariffAnnouncement& announcement) {
  std::vector<std::byte> payload;
  payload.reserve(12);
  append_u32(payload, announcement.interval_index);
  append_f64(payload, announcement.price);
  return payload;
}

TariffAnnouncement decode_tariff(std::span<const std::byte> payload,
                                 AreaId area) {
  require_size(payload, 12, "tariff");
  return TariffAnnouncement{area, read_u32(payload, 0), read_f64(payload, 4)};
}

std::vector<std::byte> encode_tariff_vector(std::span<const double> prices) {
  std::vector<std::byte> payload;
  payload.reserve(4 + 8 * prices.size());
  append_u32(payload, static_cast<std::uint32_t>(prices.size()));
  for (const double price : prices) append_f64(payload, price);
  return payload;
}

std::vector<double> decode_tariff_vector(std::span<const std::byte> payload) {
  if (payload.size() < 4) {
    fail(Errc::parse_error, "tariff vector payload truncated");
  }
  const std::uint32_t count = read_u32(payload, 0);
  require_size(payload, 4 + 8 * static_cast<std::size_t>(count),
               "tariff vector");
  std::vector<double> prices(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    prices[i] = read_f64(payload, 4 + 8 * static_cast<std::size_t>(i));
  }
  return prices;
}

std::vector<std::byte> encode_reading(const NoisyReading& reading) {
  std::vector<std::byte> payload;
  payload.reserve(21);
  append_u64(payload, reading.meter.value);
  append_u32(payload, reading.interval_index);
  append_f64(payload, reading.value);
  payload.push_back(static_cast<std::byte>(reading.replacement_flag ? 1 : 0));
  return payload;
}

NoisyReading decode_reading(std::span<const std::byte> payload) {
  require_size(payload, 21, "reading");
  return NoisyReading{MeterId{read_u64(payload, 0)}, read_u32(payload, 8),
                      read_f64(payload, 12),
                      std::to_integer<int>(payload[20]) != 0};
}

std::vector<std::byte> encode_bill(const BillNotice& notice) {
  std::vector<std::byte> payload;
  payload.reserve(17);
  append_u64(payload, notice.meter.value);
  append_f64(payload, notice.amount);
  payload.push_back(static_cast<std::byte>(notice.adjusted ? 1 : 0));
  return payload;
}

BillNotice decode_bill(std::span<const std::byte> payload) {
  require_size(payload, 17, "bill");
  return BillNotice{MeterId{read_u64(payload, 0)}, read_f64(payload, 8),
                    std::to_integer<int>(payload[16]) != 0};
}

// ---------------------------------------------------------------------------
// Aggregator
// ---------------------------------------------------------------------------

Aggregator::Aggregator(AreaId area, std::vector<MeterId> members)
    : area_(area), members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
}

void Aggregator::check_addressed_here(const Message& inbound) const {
  if (inbound.destination != NodeRef::aggregator(area_)) {
    fail(Errc::routing_error,
         "message addressed to " + to_string(inbound.destination) +
             " reached aggregator of area " + to_string(area_));
  }
}

Message Aggregator::relay(const Message& inbound) const {
  check_addressed_here(inbound);
  if (inbound.source.kind != NodeRef::Kind::meter) {
    fail(Errc::routing_error, "upstream relay expects a meter source");
  }
  const MeterId sender{inbound.source.id};
  if (!std::binary_search(members_.begin(), members_.end(), sender)) {
    fail(Errc::routing_error, "meter " + to_string(sender) +
                                  " is not in area " + to_string(area_));
  }
  Message outbound = inbound;
  outbound.source = NodeRef::aggregator(area_);
  outbound.destination = NodeRef::provider();
  return outbound;
}

Message Aggregator::relay(const Message& inbound, MeterId recipient) const {
  check_addressed_here(inbound);
  if (inbound.source.kind != NodeRef::Kind::provider) {
    fail(Errc::routing_error, "downstream relay expects the provider source");
  }
  if (!std::binary_search(members_.begin(), members_.end(), recipient)) {
    fail(Errc::routing_error, "meter " + to_string(recipient) +
                                  " is not in area " + to_string(area_));
  }
  Message outbound = inbound;
  outbound.source = NodeRef::aggregator(area_);
  outbound.destination = NodeRef::meter(recipient);
  return outbound;
}

std::vector<Message> Aggregator::broadcast(const Message& inbound) const {
  std::vector<Message> deliveries;
  deliveries.reserve(members_.size());
  for (const MeterId member : members_) {
    deliveries.push_back(relay(inbound, member));
  }
  return deliveries;
}

// ---------------------------------------------------------------------------
// SimConfig / SeedStore
// ---------------------------------------------------------------------------

SimConfig SimConfig::from_kv(std::istream& in) {
  const KvSection section = parse_kv_flat(in);

  SimConfig config;
  config.period = BillingPeriodConfig(
      static_cast<std::uint32_t>(
          parse_u64(section.get_or("interval_minutes", "15"), "interval_minutes")),
      static_cast<std::uint32_t>(parse_u64(section.get_or("days", "1"), "days")));
  config.sigma = parse_double(section.get_or("sigma", "1.0"), "sigma");
  config.period_id = parse_u64(section.get_or("period_id", "1"), "period_id");
  config.max_adjustments = static_cast<std::uint32_t>(
      parse_u64(section.get_or("max_adjustments", "1"), "max_adjustments"));

  const std::string scenario = section.get_or("scenario", "one");
  if (scenario == "one") {
    config.scenario = Scenario::one;
  } else if (scenario == "two") {
    config.scenario = Scenario::two;
  } else {
    fail(Errc::parse_error, "scenario must be 'one' or 'two', got '" +
                                scenario + "'");
  }

  for (const auto& [key, value] : section.entries) {
    if (key.rfind("meter.", 0) != 0) continue;
    const std::string id_text = key.substr(6);
    const MeterId meter{parse_u64(id_text, "meter id")};
    config.areas[meter] = AreaId{parse_u64(value, "area id")};
  }
  return config;
}

SeedMaterial SeedStore::material_for(MeterId meter,
                                     std::uint64_t period_id) const {
  auto it = secrets.find(meter);
  if (it == secrets.end()) {
    fail(Errc::validation_error,
         "no seed material for meter " + to_string(meter));
  }
  return SeedMaterial{it->second, meter, period_id};
}

SeedStore SeedStore::derive_from_master(std::uint64_t master_seed,
                                        std::span<const MeterId> meters) {
  SeedStore store;
  const threefry::Block key = {master_seed, 0x73656564u, 0, 0};
  for (const MeterId meter : meters) {
    const threefry::Block block =
        threefry::encrypt(key, {meter.value, 0, 0, 0});
    std::array<std::uint8_t, 32> secret;
    static_assert(sizeof(block) == sizeof(secret));
    std::memcpy(secret.data(), block.data(), sizeof(secret));
    store.secrets[meter] = secret;
  }
  return store;
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

Simulation::Simulation(SimConfig config,
                       std::map<MeterId, ConsumptionSeries> consumption,
                       std::map<AreaId, TariffSchedule> tariffs,
                       SeedStore seeds)
    : config_(std::move(config)),
      consumption_(std::move(consumption)),
      tariffs_(std::move(tariffs)),
      ledger_(config_.period) {
  if (config_.areas.empty()) {
    fail(Errc::validation_error, "simulation needs at least one meter");
  }

  std::map<AreaId, std::vector<MeterId>> area_members;
  for (const auto& [meter, area] : config_.areas) {
    area_members[area].push_back(meter);
  }

  for (const auto& [area, members] : area_members) {
    auto tariff_it = tariffs_.find(area);
    if (tariff_it == tariffs_.end()) {
      fail(Errc::validation_error,
           "no tariff schedule for area " + to_string(area));
    }
    validate_tariff_schedule(tariff_it->second, config_.period);
    aggregators_.emplace(area, Aggregator(area, members));
  }

  for (const auto& [meter_id, area] : config_.areas) {
    auto series_it = consumption_.find(meter_id);
    if (series_it == consumption_.end()) {
      fail(Errc::validation_error,
           "no consumption series for meter " + to_string(meter_id));
    }
    validate_consumption_series(series_it->second, config_.period);

    GaussianStream stream = derive_stream(
        seeds.material_for(meter_id, config_.period_id), config_.sigma);
    meters_.emplace(meter_id, Meter(meter_id, area, config_.period,
                                    std::move(stream),
                                    config_.max_adjustments));
    ledger_.register_meter(meter_id, area);
  }
}

const Meter& Simulation::meter(MeterId id) const {
  auto it = meters_.find(id);
  if (it == meters_.end()) {
    fail(Errc::validation_error, "unknown meter " + to_string(id));
  }
  return it->second;
}

void Simulation::deliver(std::uint32_t tick, const Message& message,
                         SimResult& result) {
  result.trace += std::to_string(tick);
  result.trace += ',';
  result.trace += to_string(message.kind);
  result.trace += ',';
  result.trace += to_string(message.source);
  result.trace += ',';
  result.trace += to_string(message.destination);
  result.trace += ',';
  result.trace += std::to_string(message.payload.size());
  result.trace += '\n';
  if (config_.capture_messages) {
    result.messages.push_back(message);
  }
}

void Simulation::note_state_size() {
  std::size_t bytes = ledger_.state_bytes();
  for (const auto& [_, meter] : meters_) {
    bytes += meter.state_bytes();
  }
  peak_state_bytes_ = std::max(peak_state_bytes_, bytes);
}

void Simulation::run_reporting_phase(SimResult& result) {
  const std::uint32_t interval_count = config_.period.interval_count();

  for (std::uint32_t tick = 1; tick <= interval_count; ++tick) {
    // Tariff dissemination: provider -> aggregator -> every area meter.
    for (const auto& [area, aggregator] : aggregators_) {
      const double price = tariffs_.at(area).prices[tick - 1];
      const TariffAnnouncement announcement =
          ledger_.issue_tariff(area, tick, price);
      const Message down{MessageKind::tariff_down, NodeRef::provider(),
                         NodeRef::aggregator(area), tick,
                         encode_tariff(announcement)};
      deliver(tick, down, result);
      for (const Message& delivery : aggregator.broadcast(down)) {
        deliver(tick, delivery, result);
      }
    }

    // Reports: meter -> aggregator -> provider. The in-home display update on
    // tariff receipt carries no protocol state; reporting starts right away.
    for (auto& [meter_id, meter] : meters_) {
      const double consumption = consumption_.at(meter_id).readings[tick - 1];
      const double price = tariffs_.at(meter.area()).prices[tick - 1];
      const NoisyReading reading =
          tick < interval_count
              ? meter.report_interval(consumption, price, tick)
              : meter.close_period(consumption, price);

      const Message up{MessageKind::reading_up, NodeRef::meter(meter_id),
                       NodeRef::aggregator(meter.area()), tick,
                       encode_reading(reading)};
      deliver(tick, up, result);
      const Message forwarded = aggregators_.at(meter.area()).relay(up);
      deliver(tick, forwarded, result);
      ledger_.record_reading(decode_reading(forwarded.payload));
    }

    note_state_size();
  }
}

void Simulation::run_billing_phase(SimResult& result) {
  const std::uint32_t tick = config_.period.interval_count() + 1;
  for (auto& [meter_id, meter] : meters_) {
    const double bill = ledger_.compute_final_bill(meter_id);
    result.final_bills[meter_id] = bill;

    const Message down{MessageKind::bill_down, NodeRef::provider(),
                       NodeRef::aggregator(meter.area()), tick,
                       encode_bill(BillNotice{meter_id, bill, false})};
    deliver(tick, down, result);
    deliver(tick, aggregators_.at(meter.area()).relay(down, meter_id), result);
  }
  note_state_size();
}

void Simulation::run_adjustment_phase(
    const std::map<AreaId, TariffSchedule>& new_tariffs, SimResult& result) {
  const std::uint32_t vector_tick = config_.period.interval_count() + 2;
  const std::uint32_t bill_tick = config_.period.interval_count() + 3;

  for (const auto& [area, aggregator] : aggregators_) {
    auto it = new_tariffs.find(area);
    if (it == new_tariffs.end()) {
      fail(Errc::validation_error,
           "no replacement tariff vector for area " + to_string(area));
    }
    validate_tariff_schedule(it->second, config_.period);

    const Message down{MessageKind::tariff_vector_down, NodeRef::provider(),
                       NodeRef::aggregator(area), vector_tick,
                       encode_tariff_vector(it->second.prices)};
    deliver(vector_tick, down, result);
    for (const Message& delivery : aggregator.broadcast(down)) {
      deliver(vector_tick, delivery, result);
    }
  }

  for (auto& [meter_id, meter] : meters_) {
    const TariffSchedule& schedule = new_tariffs.at(meter.area());
    NoisyReading replacement;
    try {
      replacement = meter.apply_tariff_adjustment(schedule);
    } catch (const Error& error) {
      if (error.code() == Errc::adjustment_budget_exhausted ||
          error.code() == Errc::phase_error) {
        result.adjustment_failures[meter_id] = error.code();
        continue;
      }
      throw;
    }

    const Message up{MessageKind::reading_up, NodeRef::meter(meter_id),
                     NodeRef::aggregator(meter.area()), vector_tick,
                     encode_reading(replacement)};
    deliver(vector_tick, up, result);
    const Message forwarded = aggregators_.at(meter.area()).relay(up);
    deliver(vector_tick, forwarded, result);

    const double rebilled =
        ledger_.rebill(meter_id, schedule, decode_reading(forwarded.payload));
    result.rebilled_bills[meter_id] = rebilled;
  }
  note_state_size();

  for (auto& [meter_id, meter] : meters_) {
    if (!result.rebilled_bills.count(meter_id)) continue;
    const Message down{
        MessageKind::bill_down, NodeRef::provider(),
        NodeRef::aggregator(meter.area()), bill_tick,
        encode_bill(BillNotice{meter_id, result.rebilled_bills.at(meter_id),
                               ledger_.bill_adjusted(meter_id)})};
    deliver(bill_tick, down, result);
    deliver(bill_tick, aggregators_.at(meter.area()).relay(down, meter_id),
            result);
  }
}

SimResult Simulation::run_scenario_one() {
  if (scenario_one_done_) {
    fail(Errc::validation_error, "simulation already ran");
  }
  SimResult result;
  run_reporting_phase(result);
  run_billing_phase(result);
  scenario_one_done_ = true;
  return result;
}

SimResult Simulation::run_scenario_two(
    const std::map<AreaId, TariffSchedule>& new_tariffs) {
  SimResult result = run_scenario_one();
  run_adjustment_phase(new_tariffs, result);
  return result;
}

SimResult Simulation::run_adjustment_round(
    const std::map<AreaId, TariffSchedule>& new_tariffs) {
  if (!scenario_one_done_) {
    fail(Errc::phase_error, "no finished period to adjust");
  }
  SimResult result;
  run_adjustment_phase(new_tariffs, result);
  return result;
}

SimResult run_scenario_one(
    const SimConfig& config,
    const std::map<MeterId, ConsumptionSeries>& consumption,
    const std::map<AreaId, TariffSchedule>& tariffs, const SeedStore& seeds) {
  Simulation simulation(config, consumption, tariffs, seeds);
  return simulation.run_scenario_one();
}

SimResult run_scenario_two(
    const SimConfig& config,
    const std::map<MeterId, ConsumptionSeries>& consumption,
    const std::map<AreaId, TariffSchedule>& tariffs,
    const std::map<AreaId, TariffSchedule>& new_tariffs,
    const SeedStore& seeds) {
  Simulation simulation(config, consumption, tariffs, seeds);
  return simulation.run_scenario_two(new_tariffs);
}

}  // namespace privmeter
