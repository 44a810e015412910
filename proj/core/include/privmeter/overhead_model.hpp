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

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace privmeter {

/// Byte-accounting model of one hop in the metering network. A payload that
/// fits max_frame_payload costs one per_frame_overhead; larger payloads are
/// fragmented, each fragment paying per_frame_overhead and each fragment
/// after the first adding per_fragment_overhead.
///
/// The shipped defaults are calibrated so that a 4-byte payload reproduces
/// the reference packet sizes exactly on every hop; the fragmented 11520-byte
/// tariff vector is exact on the 802.15.4g hop and 1 byte under the reference
/// on the three WAN hops (the per-layer composition behind those totals is
/// not public; see default_link_stacks()).
struct LinkStack {
  std::string name;
  std::uint64_t per_frame_overhead = 0;     // bytes
  std::uint64_t max_frame_payload = 0;      // bytes per fragment
  std::uint64_t per_fragment_overhead = 0;  // extra bytes per fragment after the first
  double bandwidth_total_kbps = 0.0;
  std::uint32_t meters_sharing = 1;

  double bandwidth_per_meter_kbps() const {
    return bandwidth_total_kbps / meters_sharing;
  }
};

/// On-the-wire bytes for a payload crossing one hop.
std::uint64_t packet_size(std::uint64_t payload_bytes, const LinkStack& stack);

/// Seconds to push a packet through a meter's bandwidth share:
/// bytes * 8 / (kbps * 1000).
double transmission_time_s(std::uint64_t packet_bytes,
                           double bandwidth_per_meter_kbps);

/// Sizing rule for link provisioning: the largest payload that must fit,
/// i.e. max over the per-interval tariff, the replacement tariff vector, the
/// noisy reading, and the final bill.
std::uint64_t min_bandwidth_payload(std::span<const std::uint64_t> payloads);

/// Per-value costs used by the analytic memory and compute formulas.
struct CostModel {
  double t_prng_s = 1e-6;   // one PRNG draw
  double t_arthm_s = 1e-8;  // one basic arithmetic operation
  std::uint64_t s_rand = 8;
  std::uint64_t s_c = 8;
  std::uint64_t s_nc = 8;
  std::uint64_t s_trf = 8;
  std::uint64_t s_s_trf = 8;  // stored noise-times-tariff product
  std::uint64_t s_nb = 8;
  std::uint64_t s_fb = 8;
};

enum class Role { meter, provider, total };

/// Analytic retention bound in bytes for a billing period of L intervals.
/// Meter:    L*(s_rand + s_c + s_nc + s_trf) + (L-1)*s_s_trf
/// Provider: L*(s_nc + s_nb + s_trf) + s_fb
std::uint64_t memory_estimate(Role role, std::uint64_t interval_count,
                              const CostModel& model);

/// Analytic execution-time estimate in seconds.
/// Meter:    (L-1)*t_prng + (2L+1)*t_arthm
/// Provider: 2L*t_arthm
double compute_cost_estimate(Role role, std::uint64_t interval_count,
                             const CostModel& model);

/// The four calibrated hops: SM<->AGG (802.15.4g/6LoWPAN), AGG<->eNB
/// (PDCP-LTE), eNB<->PGW and PGW<->UP (Ethernet).
std::array<LinkStack, 4> default_link_stacks();

/// Reads link stacks from a `[section]`-per-link key=value stream. Keys:
/// per_frame_overhead, max_frame_payload, per_fragment_overhead,
/// bandwidth_total_kbps, meters_sharing.
std::vector<LinkStack> load_link_stacks(std::istream& in);

/// Reference packet-size cell for calibration payloads (4 and 11520 bytes) on
/// the default stacks, if one exists. Returns 0 when the pair has no
/// reference value.
std::uint64_t reference_packet_size(const std::string& link_name,
                                    std::uint64_t payload_bytes);

/// CSV report: one row per payload x link with packet size, per-meter
/// transmission time, and reference deltas where a reference cell exists.
void write_overhead_report(std::ostream& out,
                           std::span<const LinkStack> stacks,
                           std::span<const std::uint64_t> payloads);

}  // namespace privmeter
