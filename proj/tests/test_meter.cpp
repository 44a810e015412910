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

#include "privmeter/meter.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

#include "support/error_check.hpp"
#include "support/instance_gen.hpp"
#include "support/rational_oracle.hpp"

using namespace privmeter;
using privmeter::testing::code_of;

namespace {

SeedMaterial test_seed(std::uint64_t meter, std::uint64_t period = 1) {
  SeedMaterial seed;
  seed.secret.fill(0x42);
  seed.meter = MeterId{meter};
  seed.period_id = period;
  return seed;
}

Meter make_meter(std::uint32_t interval_count, std::uint64_t id = 1,
                 std::uint32_t max_adjustments = 1, double sigma = 1.0) {
  return Meter(MeterId{id}, AreaId{1}, BillingPeriodConfig(1440, interval_count),
               derive_stream(test_seed(id), sigma), max_adjustments);
}

}  // namespace

TEST_CASE("perturbation is plain addition") {
  CHECK(make_noisy_reading(MeterId{1}, 1, 0.0, 0.0).value == 0.0);
  const NoisyReading reading = make_noisy_reading(MeterId{1}, 1, 1.5, 0.25);
  CHECK(reading.value == 1.75);
  CHECK_FALSE(reading.replacement_flag);
}

TEST_CASE("reporting draws, retains, and accumulates") {
  Meter meter = make_meter(3);
  const NoisyReading first = meter.report_interval(1.5, 0.05, 1);

  REQUIRE(meter.retained_noise().size() == 1);
  const double drawn = meter.retained_noise()[0];
  CHECK(first.value == 1.5 + drawn);
  CHECK(meter.weighted_noise_sum() == drawn * 0.05);

  const NoisyReading second = meter.report_interval(2.0, 0.07, 2);
  REQUIRE(meter.retained_noise().size() == 2);
  const double drawn2 = meter.retained_noise()[1];
  CHECK(second.value == 2.0 + drawn2);
  CHECK(meter.weighted_noise_sum() == drawn * 0.05 + drawn2 * 0.07);
}

TEST_CASE("reports must arrive strictly in order") {
  Meter meter = make_meter(96);
  for (std::uint32_t i = 1; i <= 95; ++i) {
    meter.report_interval(1.0, 0.05, i);
  }
  // Interval 95 again: the period expects close_period next, not a report.
  CHECK(code_of([&] { meter.report_interval(1.0, 0.05, 95); }) ==
        Errc::sequence_error);

  Meter fresh = make_meter(96);
  CHECK(code_of([&] { fresh.report_interval(1.0, 0.05, 2); }) ==
        Errc::sequence_error);
}

TEST_CASE("closing perturbs the last reading with the cancelling noise") {
  const std::vector<double> consumption = {1.0, 2.0, 3.0};
  const std::vector<double> prices = {0.1, 0.2, 0.3};

  Meter meter = make_meter(3);
  for (std::uint32_t i = 1; i <= 2; ++i) {
    meter.report_interval(consumption[i - 1], prices[i - 1], i);
  }
  const std::vector<double> drawn(meter.retained_noise().begin(),
                                  meter.retained_noise().end());
  const NoisyReading last = meter.close_period(consumption[2], prices[2]);

  CHECK(meter.phase() == MeterPhase::closed);
  CHECK(last.interval_index == 3);

  // Independent recomputation of the closing value.
  const double weighted = drawn[0] * prices[0] + drawn[1] * prices[1];
  CHECK(last.value == consumption[2] + (-weighted / prices[2]));

  // The full noise vector cancels exactly in rational arithmetic.
  const oracle::Rat closing = oracle::closing_noise(drawn, prices);
  CHECK(oracle::weighted_noise_sum(drawn, closing, prices) == 0);
}

TEST_CASE("close with zero accumulated noise returns the true reading") {
  // L = 1: nothing reported before the close, so the weighted sum is zero.
  Meter meter = make_meter(1);
  const NoisyReading only = meter.close_period(4.25, 0.3);
  CHECK(only.value == 4.25);
}

TEST_CASE("premature close is a sequence error") {
  Meter meter = make_meter(3);
  meter.report_interval(1.0, 0.1, 1);
  CHECK(code_of([&] { meter.close_period(2.0, 0.2); }) ==
        Errc::sequence_error);
}

TEST_CASE("tariff adjustment replaces only the closing reading") {
  const std::vector<double> consumption = {1.0, 2.0, 3.0};
  const std::vector<double> prices = {0.1, 0.2, 0.3};
  const TariffSchedule replacement{AreaId{1}, {0.2, 0.2, 0.2}};

  Meter meter = make_meter(3);
  meter.report_interval(consumption[0], prices[0], 1);
  meter.report_interval(consumption[1], prices[1], 2);
  const std::vector<double> drawn(meter.retained_noise().begin(),
                                  meter.retained_noise().end());
  meter.close_period(consumption[2], prices[2]);

  const NoisyReading adjusted = meter.apply_tariff_adjustment(replacement);
  CHECK(adjusted.replacement_flag);
  CHECK(adjusted.interval_index == 3);
  CHECK(meter.adjustments_applied() == 1);

  const double weighted =
      drawn[0] * replacement.prices[0] + drawn[1] * replacement.prices[1];
  CHECK(adjusted.value ==
        consumption[2] + (-weighted / replacement.prices[2]));

  const oracle::Rat closing =
      oracle::closing_noise(drawn, replacement.prices);
  CHECK(oracle::weighted_noise_sum(drawn, closing, replacement.prices) == 0);
}

TEST_CASE("adjustment with unchanged tariffs reproduces the closing reading") {
  const std::vector<double> prices = {0.1, 0.2, 0.3};
  Meter meter = make_meter(3);
  meter.report_interval(1.0, prices[0], 1);
  meter.report_interval(2.0, prices[1], 2);
  const NoisyReading closed = meter.close_period(3.0, prices[2]);

  const NoisyReading adjusted =
      meter.apply_tariff_adjustment(TariffSchedule{AreaId{1}, prices});
  CHECK(adjusted.value == closed.value);
}

TEST_CASE("adjustment budget is enforced") {
  const TariffSchedule replacement{AreaId{1}, {0.2, 0.2, 0.2}};
  Meter meter = make_meter(3);
  meter.report_interval(1.0, 0.1, 1);
  meter.report_interval(2.0, 0.2, 2);
  meter.close_period(3.0, 0.3);

  meter.apply_tariff_adjustment(replacement);
  CHECK(code_of([&] { meter.apply_tariff_adjustment(replacement); }) ==
        Errc::adjustment_budget_exhausted);
}

TEST_CASE("adjustment requires a closed period") {
  const TariffSchedule replacement{AreaId{1}, {0.2, 0.2, 0.2}};
  Meter meter = make_meter(3);
  meter.report_interval(1.0, 0.1, 1);
  CHECK(code_of([&] { meter.apply_tariff_adjustment(replacement); }) ==
        Errc::phase_error);
}

TEST_CASE("purge erases retention and blocks later adjustments") {
  const TariffSchedule replacement{AreaId{1}, {0.2, 0.2, 0.2}};
  Meter meter = make_meter(3);
  meter.report_interval(1.0, 0.1, 1);
  meter.report_interval(2.0, 0.2, 2);
  meter.close_period(3.0, 0.3);

  meter.purge();
  CHECK(meter.phase() == MeterPhase::purged);
  CHECK(meter.retained_noise().empty());
  CHECK_FALSE(meter.last_true_reading().has_value());
  CHECK(code_of([&] { meter.apply_tariff_adjustment(replacement); }) ==
        Errc::phase_error);

  CHECK_NOTHROW(meter.purge());  // idempotent
  CHECK(meter.phase() == MeterPhase::purged);
}

TEST_CASE("purge mid-period is refused") {
  Meter meter = make_meter(3);
  meter.report_interval(1.0, 0.1, 1);
  CHECK(code_of([&] { meter.purge(); }) == Errc::phase_error);
}

TEST_CASE("every pre-closing report differs from the true reading") {
  Meter meter = make_meter(32);
  for (std::uint32_t i = 1; i <= 31; ++i) {
    const double consumption = 0.5 + 0.01 * i;
    const NoisyReading reading = meter.report_interval(consumption, 0.2, i);
    const double drawn = meter.retained_noise()[i - 1];
    CHECK(drawn != 0.0);
    CHECK(reading.value != consumption);
    CHECK(reading.value == consumption + drawn);
  }
}

TEST_CASE("a full period cancels the tariff-weighted noise") {
  testing::Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto interval_count = static_cast<std::uint32_t>(2 + rng.below(128));
    const testing::BillingInstance instance =
        testing::make_instance(rng, interval_count);

    Meter meter(MeterId{static_cast<std::uint64_t>(trial + 1)}, AreaId{1},
                instance.config,
                derive_stream(test_seed(static_cast<std::uint64_t>(trial + 1)),
                              1.0));
    std::vector<double> noisy;
    for (std::uint32_t i = 1; i < interval_count; ++i) {
      noisy.push_back(
          meter.report_interval(instance.consumption[i - 1],
                                instance.prices[i - 1], i)
              .value);
    }
    noisy.push_back(meter
                        .close_period(instance.consumption.back(),
                                      instance.prices.back())
                        .value);

    // sum((nc_i - c_i) * trf_i) ~ 0 relative to the term mass.
    double total = 0.0;
    double mass = 0.0;
    for (std::uint32_t i = 0; i < interval_count; ++i) {
      const double term = (noisy[i] - instance.consumption[i]) * instance.prices[i];
      total += term;
      mass += std::abs(term);
    }
    if (mass > 0.0) {
      CHECK(std::abs(total) <= 1e-9 * mass);
    }
  }
}

TEST_CASE("identical seed material replays identical noisy readings") {
  const testing::BillingInstance instance = [] {
    testing::Rng rng(123);
    return testing::make_instance(rng, 64);
  }();

  const auto run = [&instance] {
    Meter meter(MeterId{5}, AreaId{1}, instance.config,
                derive_stream(test_seed(5, 9), 1.0));
    std::vector<double> values;
    for (std::uint32_t i = 1; i < 64; ++i) {
      values.push_back(meter
                           .report_interval(instance.consumption[i - 1],
                                            instance.prices[i - 1], i)
                           .value);
    }
    values.push_back(
        meter.close_period(instance.consumption.back(), instance.prices.back())
            .value);
    return values;
  };

  CHECK(run() == run());
}

TEST_CASE("restore_closed rebuilds an adjustable meter") {
  const std::vector<double> prices = {0.1, 0.2, 0.3};
  const TariffSchedule replacement{AreaId{1}, {0.2, 0.2, 0.2}};

  Meter original = make_meter(3);
  original.report_interval(1.0, prices[0], 1);
  original.report_interval(2.0, prices[1], 2);
  original.close_period(3.0, prices[2]);
  const NoisyReading expected = original.apply_tariff_adjustment(replacement);

  Meter restored = Meter::restore_closed(
      MeterId{1}, AreaId{1}, BillingPeriodConfig(1440, 3),
      std::vector<double>(original.retained_noise().begin(),
                          original.retained_noise().end()),
      3.0, 0, 1);
  const NoisyReading replayed = restored.apply_tariff_adjustment(replacement);
  CHECK(replayed.value == expected.value);

  Meter exhausted = Meter::restore_closed(
      MeterId{1}, AreaId{1}, BillingPeriodConfig(1440, 3),
      std::vector<double>(original.retained_noise().begin(),
                          original.retained_noise().end()),
      3.0, 1, 1);
  CHECK(code_of([&] { exhausted.apply_tariff_adjustment(replacement); }) ==
        Errc::adjustment_budget_exhausted);
}

TEST_CASE("state accounting tracks retained values") {
  Meter meter = make_meter(4);
  const std::size_t open_empty = meter.state_bytes();
  meter.report_interval(1.0, 0.1, 1);
  CHECK(meter.state_bytes() == open_empty + sizeof(double));
  meter.report_interval(1.0, 0.1, 2);
  meter.report_interval(1.0, 0.1, 3);
  meter.close_period(1.0, 0.1);
  CHECK(meter.state_bytes() == open_empty + 4 * sizeof(double));
  meter.purge();
  CHECK(meter.state_bytes() == sizeof(double));  // only the cleared sum slot
}
