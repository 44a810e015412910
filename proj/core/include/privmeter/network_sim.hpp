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
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "privmeter/core_types.hpp"
#include "privmeter/meter.hpp"
#include "privmeter/noise_engine.hpp"
#include "privmeter/utility_billing.hpp"

namespace privmeter {

// ---------------------------------------------------------------------------
// Topology and messages
// ---------------------------------------------------------------------------

enum class MessageKind {
  tariff_down,         // provider -> area: one interval's price
  tariff_vector_down,  // provider -> area: full replacement schedule
  reading_up,          // meter -> provider: one noisy reading
  bill_down,           // provider -> meter: final or rebilled bill
};

const char* to_string(MessageKind kind) noexcept;

struct NodeRef {
  enum class Kind { provider, aggregator, meter };
  Kind kind = Kind::provider;
  std::uint64_t id = 0;

  auto operator<=>(const NodeRef&) const = default;

  static NodeRef provider() { return {Kind::provider, 0}; }
  static NodeRef aggregator(AreaId area) { return {Kind::aggregator, area.value}; }
  static NodeRef meter(MeterId meter) { return {Kind::meter, meter.value}; }
};

std::string to_string(const NodeRef& node);

/// One hop of traffic. Channels are modeled as reliable and in-order, so a
/// message is simply handed to the next node; payload bytes are opaque to
/// everyone but the endpoints.
struct Message {
  MessageKind kind = MessageKind::tariff_down;
  NodeRef source;
  NodeRef destination;
  std::uint32_t interval_index = 0;
  std::vector<std::byte> payload;
};

// Wire formats (little-endian, fixed width).
std::vector<std::byte> encode_tariff(const TariffAnnouncement& announcement);
TariffAnnouncement decode_tariff(std::span<const std::byte> payload, AreaId area);
std::vector<std::byte> encode_tariff_vector(std::span<const double> prices);
std::vector<double> decode_tariff_vector(std::span<const std::byte> payload);
std::vector<std::byte> encode_reading(const NoisyReading& reading);
NoisyReading decode_reading(std::span<const std::byte> payload);

struct BillNotice {
  MeterId meter;
  double amount = 0.0;
  bool adjusted = false;
};
std::vector<std::byte> encode_bill(const BillNotice& notice);
BillNotice decode_bill(std::span<const std::byte> payload);

/// Per-area relay between the provider and the area's meters. Aggregators are
/// pure forwarders: payload bytes leave exactly as they arrived, only the
/// routing endpoints change.
class Aggregator {
 public:
  Aggregator(AreaId area, std::vector<MeterId> members);

  AreaId area() const { return area_; }
  const std::vector<MeterId>& members() const { return members_; }

  /// Upstream hop: a member meter's message becomes an aggregator->provider
  /// message. Rejects traffic from foreign meters.
  Message relay(const Message& inbound) const;

  /// Downstream hop to one member meter.
  Message relay(const Message& inbound, MeterId recipient) const;

  /// Downstream fan-out to every member, ascending meter id.
  std::vector<Message> broadcast(const Message& inbound) const;

 private:
  void check_addressed_here(const Message& inbound) const;

  AreaId area_;
  std::vector<MeterId> members_;  // sorted
};

// ---------------------------------------------------------------------------
// Scenario runner
// ---------------------------------------------------------------------------

/// Static description of one simulated billing period.
struct SimConfig {
  BillingPeriodConfig period{15, 1};
  std::map<MeterId, AreaId> areas;  // every meter belongs to exactly one area
  double sigma = 1.0;
  std::uint64_t period_id = 1;
  std::uint32_t max_adjustments = 1;
  enum class Scenario { one, two };
  Scenario scenario = Scenario::one;
  /// Keep full copies of every delivered message in the result. Intended for
  /// tests and small runs; traces do not need it.
  bool capture_messages = false;

  /// Reads a scenario config from a line-based key=value stream. Recognized
  /// keys: interval_minutes, days, sigma, period_id, max_adjustments,
  /// scenario (one|two), and one `meter.<id>=<area>` entry per meter.
  static SimConfig from_kv(std::istream& in);
};

/// Per-meter secrets for deriving noise streams.
struct SeedStore {
  std::map<MeterId, std::array<std::uint8_t, 32>> secrets;

  SeedMaterial material_for(MeterId meter, std::uint64_t period_id) const;

  /// Expands one master seed into per-meter secrets (test and benchmark
  /// convenience; production provisioning loads real secrets from file).
  static SeedStore derive_from_master(std::uint64_t master_seed,
                                      std::span<const MeterId> meters);
};

struct SimResult {
  std::map<MeterId, double> final_bills;
  std::map<MeterId, double> rebilled_bills;     // scenario two
  std::map<MeterId, Errc> adjustment_failures;  // meters refusing to adjust
  std::string trace;                            // `tick,kind,src,dst,bytes` lines
  std::vector<Message> messages;                // when capture_messages is set
};

/// Drives meters, aggregators, and the provider ledger through logical
/// interval ticks. Intervals are scheduler ticks 1..L; bill delivery runs at
/// tick L+1; a tariff adjustment round uses ticks L+2 (vector + replacement
/// readings) and L+3 (rebilled bills).
class Simulation {
 public:
  Simulation(SimConfig config, std::map<MeterId, ConsumptionSeries> consumption,
             std::map<AreaId, TariffSchedule> tariffs, SeedStore seeds);

  SimResult run_scenario_one();
  SimResult run_scenario_two(const std::map<AreaId, TariffSchedule>& new_tariffs);

  /// One more adjustment round against an already-finished period. Meters
  /// whose budget is spent land in adjustment_failures; their earlier rebill
  /// stays in force.
  SimResult run_adjustment_round(const std::map<AreaId, TariffSchedule>& new_tariffs);

  const ProviderLedger& ledger() const { return ledger_; }
  const Meter& meter(MeterId id) const;
  const SimConfig& config() const { return config_; }
  std::size_t peak_state_bytes() const { return peak_state_bytes_; }

 private:
  void run_reporting_phase(SimResult& result);
  void run_billing_phase(SimResult& result);
  void run_adjustment_phase(const std::map<AreaId, TariffSchedule>& new_tariffs,
                            SimResult& result);
  void deliver(std::uint32_t tick, const Message& message, SimResult& result);
  void note_state_size();

  SimConfig config_;
  std::map<MeterId, ConsumptionSeries> consumption_;
  std::map<AreaId, TariffSchedule> tariffs_;
  std::map<AreaId, Aggregator> aggregators_;
  std::map<MeterId, Meter> meters_;
  ProviderLedger ledger_;
  std::size_t peak_state_bytes_ = 0;
  bool scenario_one_done_ = false;
};

/// Scenario 1 end to end: per-interval tariff dissemination, perturbed
/// reporting, closing, billing, bill delivery.
SimResult run_scenario_one(const SimConfig& config,
                           const std::map<MeterId, ConsumptionSeries>& consumption,
                           const std::map<AreaId, TariffSchedule>& tariffs,
                           const SeedStore& seeds);

/// Scenario 2: scenario 1 followed by a tariff-vector adjustment round and a
/// rebill for every meter.
SimResult run_scenario_two(const SimConfig& config,
                           const std::map<MeterId, ConsumptionSeries>& consumption,
                           const std::map<AreaId, TariffSchedule>& tariffs,
                           const std::map<AreaId, TariffSchedule>& new_tariffs,
                           const SeedStore& seeds);

}  // namespace privmeter
