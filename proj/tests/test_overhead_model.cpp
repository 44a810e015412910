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

#include "privmeter/overhead_model.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "support/error_check.hpp"
#include "support/instance_gen.hpp"

using namespace privmeter;
using privmeter::testing::code_of;

namespace {

LinkStack stack_named(const std::string& name) {
  for (const LinkStack& stack : default_link_stacks()) {
    if (stack.name == name) return stack;
  }
  FAIL("unknown stack ", name);
  return {};
}

}  // namespace

TEST_CASE("4-byte payloads reproduce the reference packet sizes exactly") {
  CHECK(packet_size(4, stack_named("sm_agg")) == 29);
  CHECK(packet_size(4, stack_named("agg_enb")) == 58);
  CHECK(packet_size(4, stack_named("enb_pgw")) == 126);
  CHECK(packet_size(4, stack_named("pgw_up")) == 70);
}

TEST_CASE("empty payloads cost one frame header") {
  CHECK(packet_size(0, stack_named("sm_agg")) == 25);
  CHECK(packet_size(0, stack_named("pgw_up")) == 66);
}

TEST_CASE("the 11520-byte tariff vector fragments within one percent of the "
          "references") {
  // Exact on the calibrated Wi-SUN hop.
  CHECK(packet_size(11520, stack_named("sm_agg")) == 14333);

  // The WAN hops land one byte under their references; keep them within 1%.
  const struct {
    const char* link;
    std::uint64_t reference;
  } rows[] = {{"agg_enb", 11960}, {"enb_pgw", 12504}, {"pgw_up", 12056}};
  for (const auto& row : rows) {
    const std::uint64_t packet = packet_size(11520, stack_named(row.link));
    const double relative =
        std::abs(static_cast<double>(packet) - static_cast<double>(row.reference)) /
        static_cast<double>(row.reference);
    CHECK(relative <= 0.01);
    CHECK(packet == row.reference - 1);  // known fitted residual
  }
}

TEST_CASE("packet size is monotone in the payload") {
  for (const LinkStack& stack : default_link_stacks()) {
    std::uint64_t previous = packet_size(0, stack);
    for (std::uint64_t payload = 1; payload <= 4096; payload += 7) {
      const std::uint64_t current = packet_size(payload, stack);
      CHECK(current >= previous);
      previous = current;
    }
  }
}

TEST_CASE("transmission times reproduce the reference table exactly") {
  // NAN hop at 12.5 kbps per meter.
  CHECK(transmission_time_s(29, 12.5) == 0.01856);
  CHECK(transmission_time_s(14333, 12.5) == 9.17312);
  // WAN hops at 50 kbps per meter.
  CHECK(transmission_time_s(58, 50.0) == 0.00928);
  CHECK(transmission_time_s(126, 50.0) == 0.02016);
  CHECK(transmission_time_s(70, 50.0) == 0.01120);
  CHECK(transmission_time_s(11960, 50.0) == 1.91360);
  CHECK(transmission_time_s(12504, 50.0) == 2.00064);
  CHECK(transmission_time_s(12056, 50.0) == 1.92896);
}

TEST_CASE("transmission time edge cases") {
  CHECK(transmission_time_s(0, 12.5) == 0.0);
  CHECK(code_of([] { transmission_time_s(100, 0.0); }) ==
        Errc::validation_error);
}

TEST_CASE("transmission time is linear in bytes and inverse in bandwidth") {
  testing::Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t bytes = 1 + rng.below(1 << 20);
    const double bandwidth = 1.0 + rng.in_range(0.0, 999.0);
    const double base = transmission_time_s(bytes, bandwidth);
    CHECK(transmission_time_s(2 * bytes, bandwidth) ==
          doctest::Approx(2.0 * base).epsilon(1e-12));
    CHECK(transmission_time_s(bytes, 2.0 * bandwidth) ==
          doctest::Approx(0.5 * base).epsilon(1e-12));
  }
}

TEST_CASE("minimum-bandwidth payload picks the maximum") {
  const std::vector<std::uint64_t> payloads = {4, 11520, 4, 4};
  CHECK(min_bandwidth_payload(payloads) == 11520);
  CHECK(min_bandwidth_payload(std::vector<std::uint64_t>{4}) == 4);
  CHECK(min_bandwidth_payload(std::vector<std::uint64_t>{4, 4, 4, 4}) == 4);
  CHECK(code_of([] {
          min_bandwidth_payload(std::vector<std::uint64_t>{});
        }) == Errc::validation_error);
}

TEST_CASE("memory model matches hand evaluation") {
  const CostModel eight_bytes{};  // all sizes default to 8

  CHECK(memory_estimate(Role::meter, 96, eight_bytes) == 96 * 32 + 95 * 8);
  CHECK(memory_estimate(Role::meter, 1, eight_bytes) == 32);
  CHECK(memory_estimate(Role::provider, 2880, eight_bytes) == 2880 * 24 + 8);

  CostModel mixed;
  mixed.s_rand = 4;
  mixed.s_c = 4;
  mixed.s_nc = 4;
  mixed.s_trf = 2;
  mixed.s_s_trf = 8;
  mixed.s_nb = 6;
  mixed.s_fb = 16;
  CHECK(memory_estimate(Role::meter, 10, mixed) == 10 * 14 + 9 * 8);
  CHECK(memory_estimate(Role::provider, 10, mixed) == 10 * 12 + 16);
}

TEST_CASE("total memory is the sum of the roles") {
  const CostModel model{};
  for (const std::uint64_t intervals : {1ull, 2ull, 96ull, 2880ull, 35040ull}) {
    CHECK(memory_estimate(Role::total, intervals, model) ==
          memory_estimate(Role::meter, intervals, model) +
              memory_estimate(Role::provider, intervals, model));
  }
}

TEST_CASE("compute model matches hand evaluation") {
  CostModel model;
  model.t_prng_s = 1e-6;
  model.t_arthm_s = 1e-8;

  CHECK(compute_cost_estimate(Role::meter, 1, model) ==
        doctest::Approx(3e-8).epsilon(1e-12));
  CHECK(compute_cost_estimate(Role::meter, 96, model) ==
        doctest::Approx(9.693e-5).epsilon(1e-12));
  CHECK(compute_cost_estimate(Role::provider, 96, model) ==
        doctest::Approx(1.92e-6).epsilon(1e-12));
  CHECK(compute_cost_estimate(Role::total, 96, model) ==
        doctest::Approx(9.693e-5 + 1.92e-6).epsilon(1e-12));
}

TEST_CASE("link stacks load from sectioned key=value text") {
  std::istringstream in(
      "[custom]\n"
      "per_frame_overhead=10\n"
      "max_frame_payload=100\n"
      "per_fragment_overhead=2\n"
      "bandwidth_total_kbps=500\n"
      "meters_sharing=10\n");
  const std::vector<LinkStack> stacks = load_link_stacks(in);
  REQUIRE(stacks.size() == 1);
  CHECK(stacks[0].name == "custom");
  CHECK(stacks[0].per_frame_overhead == 10);
  CHECK(stacks[0].bandwidth_per_meter_kbps() == 50.0);
  CHECK(packet_size(250, stacks[0]) == 250 + 3 * 10 + 2 * 2);

  std::istringstream missing("[x]\nper_frame_overhead=1\n");
  CHECK(code_of([&] { load_link_stacks(missing); }) == Errc::parse_error);

  std::istringstream sectionless("per_frame_overhead=1\n");
  CHECK(code_of([&] { load_link_stacks(sectionless); }) == Errc::parse_error);
}

TEST_CASE("report includes reference deltas for calibration payloads") {
  const auto defaults = default_link_stacks();
  const std::vector<std::uint64_t> payloads = {4, 11520};
  std::ostringstream out;
  write_overhead_report(out, defaults, payloads);

  const std::string report = out.str();
  CHECK(report.find("payload_bytes,link,packet_bytes,transmission_time_s,"
                    "reference_bytes,delta_bytes") != std::string::npos);
  CHECK(report.find("4,sm_agg,29,0.01856,29,0") != std::string::npos);
  CHECK(report.find("11520,sm_agg,14333,9.17312,14333,0") != std::string::npos);
  CHECK(report.find("11520,agg_enb,11959,1.91344,11960,-1") !=
        std::string::npos);
}
